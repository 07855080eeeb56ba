"""Human-auditable table fixtures shipped with the package.

Each table lives in ``fixtures/<name>.tbl`` as a grid of tokens (``1 0 B X``
for four-valued tables, ``3 2 1`` for Jobe's system).  ``SHA256SUMS`` pins the
bytes of every file; :func:`verify_fixtures` refuses tables that fail the
checksum, are not total, or disagree with the in-code tables.
"""

from __future__ import annotations

import hashlib
from importlib import resources
from pathlib import Path

from provac.errors import ConfigurationError, FixtureError
from provac.lattice.tables import PRINTED, PRINTED_3, SYMBOLS, parse_grid

MANIFEST = "SHA256SUMS"


def fixture_dir() -> Path:
    return Path(str(resources.files("provac.lattice") / "fixtures"))


def _alphabet(name: str) -> tuple[str, ...]:
    return ("3", "2", "1") if name in PRINTED_3 else ("1", "0", "B", "X")


def render_fixture(name: str) -> str:
    rows = PRINTED_3[name] if name in PRINTED_3 else PRINTED[name]
    title = SYMBOLS.get(name, name)
    lines = [f"# {name} ({title})"]
    lines += [" ".join(row.split()) for row in rows]
    return "\n".join(lines) + "\n"


def read_fixture(name: str, directory: Path | None = None) -> list[list[str]]:
    path = (directory or fixture_dir()) / f"{name}.tbl"
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FixtureError(f"cannot read fixture {path}: {exc}") from exc
    rows = [ln for ln in (line.split("#", 1)[0].strip() for line in text.splitlines()) if ln]
    try:
        return parse_grid(rows, _alphabet(name))
    except ConfigurationError as exc:
        raise FixtureError(f"fixture {name}: {exc}") from exc


def read_manifest(directory: Path | None = None) -> dict[str, str]:
    path = (directory or fixture_dir()) / MANIFEST
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise FixtureError(f"cannot read checksum manifest: {exc}") from exc
    sums = {}
    for line in lines:
        if line.strip():
            digest, filename = line.split()
            sums[filename] = digest
    return sums


def write_fixtures(directory: Path | None = None) -> None:
    """Regenerate every fixture file and the manifest from the in-code tables."""
    directory = directory or fixture_dir()
    directory.mkdir(parents=True, exist_ok=True)
    sums = []
    for name in sorted({*PRINTED, *PRINTED_3}):
        data = render_fixture(name).encode("utf-8")
        (directory / f"{name}.tbl").write_bytes(data)
        sums.append(f"{hashlib.sha256(data).hexdigest()}  {name}.tbl")
    (directory / MANIFEST).write_text("\n".join(sums) + "\n", encoding="utf-8")


def fixture_problems(directory: Path | None = None) -> list[str]:
    directory = directory or fixture_dir()
    problems = []
    try:
        sums = read_manifest(directory)
    except FixtureError as exc:
        return [str(exc)]
    for name in sorted({*PRINTED, *PRINTED_3}):
        filename = f"{name}.tbl"
        path = directory / filename
        if filename not in sums:
            problems.append(f"{filename}: not listed in {MANIFEST}")
            continue
        try:
            digest = hashlib.sha256(path.read_bytes()).hexdigest()
        except OSError:
            problems.append(f"{filename}: missing")
            continue
        if digest != sums[filename]:
            problems.append(f"{filename}: checksum mismatch")
            continue
        try:
            grid = read_fixture(name, directory)
        except FixtureError as exc:
            problems.append(str(exc))
            continue
        expected = PRINTED_3[name] if name in PRINTED_3 else PRINTED[name]
        if grid != [row.split() for row in expected]:
            problems.append(f"{filename}: cells differ from the built-in table")
    return problems


def verify_fixtures(directory: Path | None = None) -> None:
    problems = fixture_problems(directory)
    if problems:
        raise FixtureError("table fixtures failed verification: " + "; ".join(problems))
