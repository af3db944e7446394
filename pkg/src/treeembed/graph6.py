"""graph6 encoding and decoding.

Only the plain graph6 flavour is handled (no sparse6 / digraph6).  Encoding
is canonical: upper-triangle bits in column order, zero padding, so
``encode(decode(s)) == s`` for every well-formed ``s``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Iterator

from .errors import Graph6Error
from .graph import Graph

HEADER = b">>graph6<<"


def _encode_n(n: int) -> bytes:
    if n < 0:
        raise ValueError("negative vertex count")
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)])
    if n <= 68719476735:
        return bytes([126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)])
    raise ValueError("graph too large for graph6")


def _decode_n(data: bytes, pos: int) -> tuple[int, int]:
    def six(i):
        if i >= len(data):
            raise Graph6Error("truncated size field", i)
        b = data[i]
        if not 63 <= b <= 126:
            raise Graph6Error(f"invalid byte {b!r} in size field", i)
        return b - 63

    first = six(pos)
    if first < 63:
        return first, pos + 1
    if pos + 1 < len(data) and data[pos + 1] == 126:
        n = 0
        for i in range(pos + 2, pos + 8):
            n = (n << 6) | six(i)
        return n, pos + 8
    n = 0
    for i in range(pos + 1, pos + 4):
        n = (n << 6) | six(i)
    return n, pos + 4


def encode(g: Graph, header: bool = False) -> bytes:
    out = bytearray(HEADER if header else b"")
    out += _encode_n(g.n)
    masks = g.masks
    acc = nbits = 0
    for j in range(1, g.n):
        mj = masks[j]
        for i in range(j):
            acc = (acc << 1) | ((mj >> i) & 1)
            nbits += 1
            if nbits == 6:
                out.append(acc + 63)
                acc = nbits = 0
    if nbits:
        out.append((acc << (6 - nbits)) + 63)
    return bytes(out)


def decode(data: bytes | str) -> Graph:
    if isinstance(data, str):
        data = data.encode("ascii")
    data = data.strip()
    pos = len(HEADER) if data.startswith(HEADER) else 0
    n, pos = _decode_n(data, pos)
    nbits = n * (n - 1) // 2
    nbytes = (nbits + 5) // 6
    body = data[pos:]
    if len(body) < nbytes:
        raise Graph6Error(f"expected {nbytes} edge bytes for n={n}, got {len(body)}", len(data))
    if len(body) > nbytes:
        raise Graph6Error("trailing bytes after edge data", pos + nbytes)
    adj = [0] * n
    i, j = 0, 1
    for off, b in enumerate(body):
        if not 63 <= b <= 126:
            raise Graph6Error(f"invalid byte {b!r} in edge data", pos + off)
        val = b - 63
        for s in range(5, -1, -1):
            bit = (val >> s) & 1
            if j >= n:
                if bit:
                    raise Graph6Error("nonzero padding bit", pos + off)
                continue
            if bit:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
            i += 1
            if i == j:
                i, j = 0, j + 1
    return Graph.from_masks(adj, check=False)


def iter_file(path, *, skip_blank: bool = True) -> Iterator[Graph]:
    """Yield one graph per non-empty line of a graph6 file."""
    with open(path, "rb") as fh:
        for line in fh:
            line = line.strip()
            if not line and skip_blank:
                continue
            yield decode(line)


def write_file(path, graphs: Iterable[Graph]) -> int:
    count = 0
    with open(Path(path), "wb") as fh:
        for g in graphs:
            fh.write(encode(g) + b"\n")
            count += 1
    return count
