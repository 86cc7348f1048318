"""Run every CLI command on every fixture, saving all output under a directory.

Used by the determinism check: two runs in fresh interpreters with different
hash seeds must leave byte-identical trees.
"""

import contextlib
import io
import sys
from pathlib import Path

from hmcurve.cli import main
from hmcurve.geometry import canonical_point, format_dyadic

FIXTURES = Path(__file__).parent / "fixtures"
LEVEL = "3"
# jobs also rerun with --out, to cover the file-writing path
WRITE_FILE = {"curve.json", "arc.json", "cantor.json"}


def point_text(p) -> str:
    return ",".join(format_dyadic(v) for v in p)


def jobs(name: str, path: Path, X) -> dict[str, list[str]]:
    s = X.side
    far = tuple((v + 1) * s for v in X.cells[-1])
    src = ["--input", str(path)]
    arc = ["--x", point_text(canonical_point(X)), "--y", point_text(far)]
    return {
        "curve.json": ["curve", *src, "--level", LEVEL],
        "curve.csv": ["curve", *src, "--level", LEVEL, "--format", "csv"],
        "curve.svg": ["curve", *src, "--level", LEVEL, "--format", "svg"],
        "arc.json": ["arc", *src, "--level", LEVEL, *arc],
        "arc.csv": ["arc", *src, "--level", LEVEL, *arc, "--format", "csv"],
        "arc.svg": ["arc", *src, "--level", LEVEL, *arc, "--format", "svg"],
        "cantor.json": ["cantor", *src],
        "validate.txt": ["validate", *src, "--level", LEVEL],
    }


def run_all(out_dir: Path) -> None:
    from hmcurve.io import load_shape

    for path in sorted(FIXTURES.glob("*.txt")):
        X = load_shape(path)
        for label, argv in jobs(path.stem, path, X).items():
            stdout = io.StringIO()
            with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(io.StringIO()):
                status = main(argv)
            (out_dir / f"{path.stem}.{label}").write_text(stdout.getvalue())
            (out_dir / f"{path.stem}.{label}.status").write_text(f"{status}\n")
            if label not in WRITE_FILE:
                continue
            written = out_dir / f"{path.stem}.{label}.file"
            with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
                main([*argv, "--out", str(written)])


if __name__ == "__main__":
    run_all(Path(sys.argv[1]))
