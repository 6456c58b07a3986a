"""Collects one verdict line per acceptance criterion for the terminal summary."""

LINES = {}


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"
    LINES[number] = line
    print(line)
    return ok
