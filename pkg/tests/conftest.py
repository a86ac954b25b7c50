import subprocess
import sys
from pathlib import Path

from normlog.parser import parse_module
from normlog.syntax import check_well_formed
from normlog.typecheck import elaborate, typecheck_module

ROOT = Path(__file__).resolve().parent.parent
CASES = ROOT / "cases"


def load_case(name):
    """Parse, validate, elaborate and typecheck a module from cases/."""
    m = parse_module((CASES / name).read_text())
    problems = [d for d in check_well_formed(m) if d.severity == "error"]
    assert not problems, problems
    m = elaborate(m)
    typecheck_module(m)
    return m


def run_cli(*args):
    """Run the installed command line in a subprocess.

    Working directory is the repository root so that cases/... paths in
    tests match what a user would type.
    """
    proc = subprocess.run(
        [sys.executable, "-m", "normlog.cli", *[str(a) for a in args]],
        capture_output=True,
        text=True,
        cwd=ROOT,
    )
    return proc.returncode, proc.stdout, proc.stderr
