#!/usr/bin/env python3
"""Builds data/mini_corpus.jsonl.

Every solution is run with the real CPython interpreter against the test
suite before being frozen: correct solutions must pass every case, incorrect
ones must fail at least one. Expected outputs come from per-problem reference
functions, not from the solutions themselves.
"""

import json
import pathlib
import subprocess
import sys

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "mini_corpus.jsonl"


def run(src, stdin_text):
    try:
        p = subprocess.run(
            [sys.executable, "-c", src],
            input=stdin_text,
            capture_output=True,
            text=True,
            timeout=5,
        )
    except subprocess.TimeoutExpired:
        return None
    if p.returncode != 0:
        return None
    return p.stdout


def norm(text):
    lines = [ln.rstrip() for ln in text.split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines)


PROBLEMS = []


def problem(name, difficulty, ref, inputs, solutions, incorrect):
    tests = []
    for raw in inputs:
        stdin_text = "\n".join(str(x) for x in raw) + "\n"
        expected = ref(*raw)
        if not expected.endswith("\n"):
            expected += "\n"
        tests.append({"input": stdin_text, "output": expected})
    PROBLEMS.append(
        {
            "name": name,
            "difficulty": difficulty,
            "tests": tests,
            "solutions": solutions,
            "incorrect_solutions": incorrect,
        }
    )


problem(
    "sum-two",
    800,
    lambda a, b: str(a + b),
    [(1, 2), (0, 0), (-5, 7), (100, 250), (999999999999, 1)],
    [
        "a = int(input())\nb = int(input())\nprint(a + b)\n",
        "x = int(input())\ny = int(input())\ns = x + y\nprint(s)\n",
        "total = 0\nfor i in range(2):\n    total += int(input())\nprint(total)\n",
        "a = int(input())\nb = int(input())\nif a > b:\n    print(a + b)\nelse:\n    print(b + a)\n",
    ],
    [
        "a = int(input())\nb = int(input())\nprint(a - b)\n",
        "a = int(input())\nb = int(input())\nprint(a + b + 1)\n",
    ],
)

problem(
    "max-two",
    800,
    lambda a, b: str(max(a, b)),
    [(3, 9), (9, 3), (4, 4), (-7, -2), (0, -1)],
    [
        "a = int(input())\nb = int(input())\nif a > b:\n    print(a)\nelse:\n    print(b)\n",
        "a = int(input())\nb = int(input())\nm = a\nif b > m:\n    m = b\nprint(m)\n",
        "a = int(input())\nb = int(input())\nfirst = True\nif a < b:\n    first = False\nif first:\n    print(a)\nelse:\n    print(b)\n",
        "a = int(input())\nb = int(input())\nif a >= b:\n    print(a)\nelse:\n    print(b)\n",
    ],
    [
        "a = int(input())\nb = int(input())\nif a < b:\n    print(a)\nelse:\n    print(b)\n",
        "a = int(input())\nb = int(input())\nprint(a)\n",
    ],
)

problem(
    "sum-one-to-n",
    900,
    lambda n: str(n * (n + 1) // 2),
    [(1,), (4,), (10,), (100,), (0,)],
    [
        "n = int(input())\ntotal = 0\nfor i in range(1, n + 1):\n    total += i\nprint(total)\n",
        "n = int(input())\ntotal = 0\ni = 1\nwhile i <= n:\n    total += i\n    i += 1\nprint(total)\n",
        "n = int(input())\nprint(n * (n + 1) // 2)\n",
        "n = int(input())\np = n + 1\nq = n * p\nprint(q // 2)\n",
    ],
    [
        "n = int(input())\ntotal = 0\nfor i in range(n):\n    total += i\nprint(total)\n",
        "n = int(input())\nprint(n * (n - 1) // 2)\n",
    ],
)

problem(
    "factorial",
    1000,
    lambda n: str(__import__("math").factorial(n)),
    [(0,), (1,), (5,), (10,), (15,)],
    [
        "n = int(input())\nacc = 1\nfor i in range(1, n + 1):\n    acc *= i\nprint(acc)\n",
        "n = int(input())\nacc = 1\ni = 2\nwhile i <= n:\n    acc *= i\n    i += 1\nprint(acc)\n",
        "n = int(input())\nacc = 1\nwhile n > 1:\n    acc *= n\n    n -= 1\nprint(acc)\n",
        "n = int(input())\nr = 1\nfor k in range(2, n + 1):\n    r = r * k\nprint(r)\n",
    ],
    [
        "n = int(input())\nacc = 1\nfor i in range(1, n):\n    acc *= i\nprint(acc)\n",
        "n = int(input())\nacc = 0\nfor i in range(1, n + 1):\n    acc *= i\nprint(acc)\n",
    ],
)

problem(
    "parity",
    800,
    lambda n: "even" if n % 2 == 0 else "odd",
    [(0,), (1,), (2,), (7,), (1000,), (-3,)],
    [
        'n = int(input())\nif n % 2 == 0:\n    print("even")\nelse:\n    print("odd")\n',
        'n = int(input())\nodd = False\nif n % 2 == 1:\n    odd = True\nif odd:\n    print("odd")\nelse:\n    print("even")\n',
        'n = int(input())\nr = n % 2\nif r == 1:\n    print("odd")\nelse:\n    print("even")\n',
        'n = int(input())\nif n // 2 * 2 == n:\n    print("even")\nelse:\n    print("odd")\n',
    ],
    [
        'n = int(input())\nif n % 2 == 0:\n    print("odd")\nelse:\n    print("even")\n',
        'n = int(input())\nprint("even")\n',
    ],
)

problem(
    "count-down",
    900,
    lambda n: "\n".join(str(i) for i in range(n, 0, -1)),
    [(1,), (2,), (3,), (5,), (4,)],
    [
        "n = int(input())\nwhile n > 0:\n    print(n)\n    n -= 1\n",
        "n = int(input())\nfor i in range(n, 0, -1):\n    print(i)\n",
        "n = int(input())\nfor i in range(n):\n    print(n - i)\n",
        "n = int(input())\nk = n\nwhile k >= 1:\n    print(k)\n    k = k - 1\n",
    ],
    [
        "n = int(input())\nwhile n >= 0:\n    print(n)\n    n -= 1\n",
        "n = int(input())\nfor i in range(1, n + 1):\n    print(i)\n",
    ],
)

problem(
    "abs-diff",
    800,
    lambda a, b: str(abs(a - b)),
    [(9, 4), (4, 9), (5, 5), (-3, 7), (0, -12)],
    [
        "a = int(input())\nb = int(input())\nif a > b:\n    print(a - b)\nelse:\n    print(b - a)\n",
        "a = int(input())\nb = int(input())\nd = a - b\nif d < 0:\n    d = -d\nprint(d)\n",
        "a = int(input())\nb = int(input())\nif a < b:\n    t = a\n    a = b\n    b = t\nprint(a - b)\n",
        "a = int(input())\nb = int(input())\nd = b - a\nif a > b:\n    d = a - b\nprint(d)\n",
    ],
    [
        "a = int(input())\nb = int(input())\nprint(a - b)\n",
        "a = int(input())\nb = int(input())\nprint(a + b)\n",
    ],
)

problem(
    "divisor-count",
    1200,
    lambda n: str(sum(1 for d in range(1, n + 1) if n % d == 0)),
    [(1,), (6,), (12,), (13,), (100,)],
    [
        "n = int(input())\ncount = 0\nfor d in range(1, n + 1):\n    if n % d == 0:\n        count += 1\nprint(count)\n",
        "n = int(input())\ncount = 0\nd = 1\nwhile d <= n:\n    if n % d == 0:\n        count += 1\n    d += 1\nprint(count)\n",
        "n = int(input())\nc = 0\nfor d in range(1, n + 1):\n    r = n % d\n    if r == 0:\n        c = c + 1\nprint(c)\n",
        "n = int(input())\ncount = 0\nfor d in range(n):\n    if n % (d + 1) == 0:\n        count += 1\nprint(count)\n",
    ],
    [
        "n = int(input())\ncount = 0\nfor d in range(1, n):\n    if n % d == 0:\n        count += 1\nprint(count)\n",
        "n = int(input())\ncount = 0\nfor d in range(1, n + 1):\n    if n % d == 1:\n        count += 1\nprint(count)\n",
    ],
)


def fib(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return str(a)


problem(
    "fibonacci",
    1400,
    fib,
    [(0,), (1,), (2,), (7,), (20,), (30,)],
    [
        "n = int(input())\na = 0\nb = 1\nfor i in range(n):\n    c = a + b\n    a = b\n    b = c\nprint(a)\n",
        "n = int(input())\na = 0\nb = 1\ni = 0\nwhile i < n:\n    c = a + b\n    a = b\n    b = c\n    i += 1\nprint(a)\n",
        "n = int(input())\nxs = [0, 1]\nfor i in range(n):\n    xs = xs + [xs[i] + xs[i + 1]]\nprint(xs[n])\n",
        "n = int(input())\nprev = 0\ncur = 1\nfor step in range(n):\n    nxt = prev + cur\n    prev = cur\n    cur = nxt\nprint(prev)\n",
    ],
    [
        "n = int(input())\na = 1\nb = 0\nfor i in range(n):\n    c = a + b\n    a = b\n    b = c\nprint(a)\n",
        "n = int(input())\na = 0\nb = 1\nfor i in range(n + 1):\n    c = a + b\n    a = b\n    b = c\nprint(a)\n",
    ],
)

problem(
    "star-triangle",
    1000,
    lambda n: "\n".join("*" * i for i in range(1, n + 1)),
    [(1,), (2,), (3,), (4,), (5,)],
    [
        'n = int(input())\nfor i in range(1, n + 1):\n    print("*" * i)\n',
        'n = int(input())\ns = ""\nfor i in range(n):\n    s += "*"\n    print(s)\n',
        'n = int(input())\ni = 1\nwhile i <= n:\n    print("*" * i)\n    i += 1\n',
        'n = int(input())\nfor i in range(n):\n    row = ""\n    for j in range(i + 1):\n        row = row + "*"\n    print(row)\n',
    ],
    [
        'n = int(input())\nfor i in range(1, n + 1):\n    print("*" * n)\n',
        'n = int(input())\nfor i in range(n):\n    print("*" * i)\n',
    ],
)

problem(
    "sign",
    900,
    lambda n: str((n > 0) - (n < 0)),
    [(-5,), (0,), (9,), (-1,), (123,)],
    [
        "n = int(input())\nif n > 0:\n    print(1)\nelse:\n    if n < 0:\n        print(-1)\n    else:\n        print(0)\n",
        "n = int(input())\nif n == 0:\n    print(0)\nelse:\n    if n > 0:\n        print(1)\n    else:\n        print(-1)\n",
        "n = int(input())\nneg = False\nif n < 0:\n    neg = True\nif neg:\n    print(-1)\nelse:\n    if n == 0:\n        print(0)\n    else:\n        print(1)\n",
        "n = int(input())\ns = 0\nif n > 0:\n    s = 1\nif n < 0:\n    s = -1\nprint(s)\n",
    ],
    [
        "n = int(input())\nif n >= 0:\n    print(1)\nelse:\n    print(-1)\n",
        "n = int(input())\nprint(n)\n",
    ],
)

problem(
    "sum-list",
    1100,
    lambda n, *xs: str(sum(xs)),
    [(3, 1, 2, 3), (1, 5), (4, -1, -2, 3, 4), (2, 10, 20), (5, 0, 0, 0, 0, 7)],
    [
        "n = int(input())\ntotal = 0\nfor i in range(n):\n    total += int(input())\nprint(total)\n",
        "n = int(input())\ntotal = 0\ni = 0\nwhile i < n:\n    total += int(input())\n    i += 1\nprint(total)\n",
        "n = int(input())\nxs = []\nfor i in range(n):\n    xs = xs + [int(input())]\ntotal = 0\nfor i in range(len(xs)):\n    total += xs[i]\nprint(total)\n",
        "n = int(input())\ns = 0\nfor i in range(n):\n    v = int(input())\n    s = s + v\nprint(s)\n",
    ],
    [
        "n = int(input())\ntotal = 0\nfor i in range(n - 1):\n    total += int(input())\nprint(total)\n",
        "n = int(input())\ntotal = n\nfor i in range(n):\n    total += int(input())\nprint(total)\n",
    ],
)


def main():
    failures = []
    for p in PROBLEMS:
        assert len(p["tests"]) >= 5, p["name"]
        assert len(p["solutions"]) >= 4, p["name"]
        assert len(p["incorrect_solutions"]) >= 2, p["name"]
        for si, src in enumerate(p["solutions"]):
            for t in p["tests"]:
                got = run(src, t["input"])
                if got is None or norm(got) != norm(t["output"]):
                    failures.append(f"{p['name']}/s{si}: {t['input']!r} -> {got!r}, want {t['output']!r}")
        for si, src in enumerate(p["incorrect_solutions"]):
            ok = True
            for t in p["tests"]:
                got = run(src, t["input"])
                if got is None or norm(got) != norm(t["output"]):
                    ok = False
                    break
            if ok:
                failures.append(f"{p['name']}/i{si}: passes every test, should fail one")
    if failures:
        print("\n".join(failures))
        sys.exit(1)
    with open(OUT, "w") as f:
        for p in PROBLEMS:
            f.write(json.dumps(p) + "\n")
    print(f"wrote {OUT} with {len(PROBLEMS)} problems")


if __name__ == "__main__":
    main()
