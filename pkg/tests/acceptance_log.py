"""Per-criterion outcome lines, printed at the end of the pytest run."""
LINES = {}


def record(num, title, ok, detail):
    line = f"criterion {num} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    LINES[num] = line
    print(line)
    return ok
