"""Plain-text problem files.

Grammar (one item per line, ``#`` starts a comment, blank lines ignored)::

    n <int>
    convention half|nohalf
    delta1 <float>
    delta2 <float>
    A dense            followed by n rows of n floats
    A sparse <nnz>     followed by nnz lines "i j value" (0-based; upper triangle)
    a                  followed by one line of n floats
    B dense | B sparse <nnz>
    c                  followed by one line of n floats
    meta <key> <value> optional, any number
    end                optional

``convention nohalf`` means the objective is ``x'Ax + a'x``; ``A`` is doubled
on reading so that the in-memory problem always uses ``1/2 x'Ax + a'x``.
Floats are written with ``repr`` so dense sections round-trip bit for bit.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ProblemFileError
from .problem import TtrsProblem

__all__ = ["ProblemFile", "read_problem", "write_problem", "parse_problem", "format_problem"]

SPARSE_THRESHOLD = 0.25  # written sparse when at most this fraction of entries is nonzero


@dataclass
class ProblemFile:
    problem: TtrsProblem
    meta: dict = field(default_factory=dict)
    convention: str = "half"  # as declared in the file; ``problem`` is always in the half form


class _Lines:
    def __init__(self, text):
        self.items = []
        for no, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0]
            if body.strip():
                self.items.append((no, body))
        self.pos = 0

    def next(self, what):
        if self.pos >= len(self.items):
            last = self.items[-1][0] if self.items else 0
            raise ProblemFileError(f"unexpected end of file while reading {what}", line=last + 1, column=1)
        item = self.items[self.pos]
        self.pos += 1
        return item

    def done(self):
        return self.pos >= len(self.items)


def _tokens(body):
    """Whitespace-separated tokens with their 1-based columns."""
    out = []
    i = 0
    while i < len(body):
        if body[i].isspace():
            i += 1
            continue
        j = i
        while j < len(body) and not body[j].isspace():
            j += 1
        out.append((body[i:j], i + 1))
        i = j
    return out


def _float(tok, line, col, what):
    try:
        v = float(tok)
    except ValueError:
        raise ProblemFileError(f"expected a number for {what}, got {tok!r}", line, col) from None
    if not np.isfinite(v):
        raise ProblemFileError(f"{what} must be finite, got {tok!r}", line, col)
    return v


def _int(tok, line, col, what):
    try:
        return int(tok)
    except ValueError:
        raise ProblemFileError(f"expected an integer for {what}, got {tok!r}", line, col) from None


def _row(lines, n, what):
    no, body = lines.next(what)
    toks = _tokens(body)
    if len(toks) != n:
        # first surplus value, or just past the last one when values are missing
        col = toks[n][1] if len(toks) > n else toks[-1][1] + len(toks[-1][0]) if toks else 1
        raise ProblemFileError(f"{what} needs {n} values, found {len(toks)}", no, col)
    return np.array([_float(t, no, c, what) for t, c in toks])


def _matrix(lines, name, toks, no, n):
    if len(toks) < 2:
        raise ProblemFileError(f"{name} section needs 'dense' or 'sparse <nnz>'", no, toks[0][1])
    kind, kcol = toks[1]
    if kind == "dense":
        return np.vstack([_row(lines, n, f"row {i} of {name}") for i in range(n)])
    if kind == "sparse":
        if len(toks) != 3:
            raise ProblemFileError(f"'{name} sparse' needs an entry count", no, kcol)
        nnz = _int(toks[2][0], no, toks[2][1], "entry count")
        M = np.zeros((n, n))
        for _ in range(nnz):
            eno, body = lines.next(f"entries of {name}")
            et = _tokens(body)
            if len(et) != 3:
                raise ProblemFileError(f"{name} entry needs 'i j value'", eno, et[0][1] if et else 1)
            i = _int(et[0][0], eno, et[0][1], "row index")
            j = _int(et[1][0], eno, et[1][1], "column index")
            for idx, (_, col) in zip((i, j), et[:2]):
                if not 0 <= idx < n:
                    raise ProblemFileError(f"index {idx} out of range for n={n}", eno, col)
            v = _float(et[2][0], eno, et[2][1], f"{name} entry")
            M[i, j] = v
            M[j, i] = v
        return M
    raise ProblemFileError(f"unknown matrix layout {kind!r}", no, kcol)


def parse_problem(text):
    """Parse problem-file text into a :class:`ProblemFile`."""
    lines = _Lines(text)
    header = {}
    sections = {}
    meta = {}
    n = None
    while not lines.done():
        no, body = lines.next("a keyword")
        toks = _tokens(body)
        key, kcol = toks[0]
        if key == "end":
            break
        if key in ("n", "delta1", "delta2", "convention"):
            if len(toks) != 2:
                raise ProblemFileError(f"'{key}' takes exactly one value", no, kcol)
            val, vcol = toks[1]
            if key == "n":
                n = _int(val, no, vcol, "n")
                if n < 1:
                    raise ProblemFileError("n must be positive", no, vcol)
                header["n"] = n
            elif key == "convention":
                if val not in ("half", "nohalf"):
                    raise ProblemFileError(f"convention must be 'half' or 'nohalf', got {val!r}", no, vcol)
                header["convention"] = val
            else:
                header[key] = _float(val, no, vcol, key)
            continue
        if key == "meta":
            if len(toks) < 3:
                raise ProblemFileError("'meta' needs a key and a value", no, kcol)
            meta[toks[1][0]] = body[toks[2][1] - 1 :].strip()
            continue
        if key in ("A", "B", "a", "c"):
            if n is None:
                raise ProblemFileError(f"'{key}' section before 'n'", no, kcol)
            if key in sections:
                raise ProblemFileError(f"duplicate '{key}' section", no, kcol)
            if key in ("A", "B"):
                sections[key] = _matrix(lines, key, toks, no, n)
            else:
                if len(toks) != 1:
                    raise ProblemFileError(f"'{key}' takes its values on the next line", no, toks[1][1])
                sections[key] = _row(lines, n, f"vector {key}")
            continue
        raise ProblemFileError(f"unknown keyword {key!r}", no, kcol)

    last = lines.items[-1][0] + 1 if lines.items else 1
    for req in ("n", "delta1", "delta2"):
        if req not in header:
            raise ProblemFileError(f"missing '{req}'", last, 1)
    for req in ("A", "a", "B", "c"):
        if req not in sections:
            raise ProblemFileError(f"missing '{req}' section", last, 1)
    A = sections["A"]
    if header.get("convention", "half") == "nohalf":
        A = 2.0 * A
    try:
        p = TtrsProblem(A, sections["a"], sections["B"], sections["c"], header["delta1"], header["delta2"])
    except ValueError as exc:
        raise ProblemFileError(f"invalid problem data: {exc}", last, 1) from exc
    return ProblemFile(p, meta, header.get("convention", "half"))


def read_problem(path):
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


def _fmt(v):
    return repr(float(v))


def _format_matrix(name, M, sparse):
    n = M.shape[0]
    if sparse is None:
        sparse = np.count_nonzero(M) <= SPARSE_THRESHOLD * n * n
    if not sparse:
        return [f"{name} dense"] + [" ".join(_fmt(v) for v in row) for row in M]
    i, j = np.nonzero(np.triu(M))
    out = [f"{name} sparse {i.shape[0]}"]
    out += [f"{r} {s} {_fmt(M[r, s])}" for r, s in zip(i, j)]
    return out


def format_problem(p, meta=None, sparse=None):
    """Serialize a problem (``1/2 x'Ax`` convention). ``sparse=None`` picks the layout by fill."""
    out = [
        "# two-ellipsoid quadratic problem",
        f"n {p.n}",
        "convention half",
        f"delta1 {_fmt(p.delta1)}",
        f"delta2 {_fmt(p.delta2)}",
    ]
    for k, v in (meta or {}).items():
        out.append(f"meta {k} {v}")
    out += _format_matrix("A", p.A, sparse)
    out += ["a", " ".join(_fmt(v) for v in p.a)]
    out += _format_matrix("B", p.B, sparse)
    out += ["c", " ".join(_fmt(v) for v in p.c)]
    out.append("end")
    return "\n".join(out) + "\n"


def write_problem(path, p, meta=None, sparse=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_problem(p, meta, sparse))
