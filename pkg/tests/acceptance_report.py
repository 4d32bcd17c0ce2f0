"""Collects one summary line per acceptance criterion."""

LINES: dict[str, str] = {}


def report(tag: str, ok: bool, detail: str) -> bool:
    LINES[tag] = f"{tag}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(LINES[tag])
    return ok
