"""Encode files onto servers, query them, and reconstruct the wanted file.

Storage layout: file ``i`` is ``s`` stripes of ``k`` symbols.  Stripe
``sigma`` of file ``i`` is encoded by the storage code independently, and
server ``j`` stores the column ``y_j`` of length ``m * s`` whose entry
``i * s + sigma`` is coordinate ``j`` of that codeword.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from pirlab.codes import LinearCode
from pirlab.field import FieldElement, PrimeField
from pirlab.matrix import Matrix, SingularSystemError
from pirlab.schemes import RetrievalScheme


class SimulationError(ValueError):
    pass


class ReconstructionError(ArithmeticError):
    """Responses are inconsistent with the scheme (corrupted scheme or transcript)."""


@dataclass(frozen=True)
class StorageSystem:
    code: LinearCode
    stripes: int
    files: tuple[tuple[tuple[int, ...], ...], ...]
    encoded: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def field(self) -> PrimeField:
        return self.code.field

    @property
    def m(self) -> int:
        return len(self.files)

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def k(self) -> int:
        return self.code.k

    def server_column(self, j: int) -> tuple[int, ...]:
        """The vector ``y_j`` held by server ``j``."""
        return tuple(self.encoded[i][s][j] for i in range(self.m) for s in range(self.stripes))


def _normalize_file(raw, k: int, stripes: int, p: int, idx: int) -> tuple[tuple[int, ...], ...]:
    raw = list(raw)
    if raw and all(isinstance(x, (list, tuple)) for x in raw):
        rows = [list(r) for r in raw]
    else:
        if len(raw) != k * stripes:
            raise SimulationError(f"file {idx} has {len(raw)} symbols, expected k*stripes = {k * stripes}")
        rows = [raw[s * k:(s + 1) * k] for s in range(stripes)]
    if len(rows) != stripes or any(len(r) != k for r in rows):
        raise SimulationError(f"file {idx} must be {stripes} stripes of {k} symbols")
    return tuple(tuple(int(v) % p for v in r) for r in rows)


def encode_storage(files: Sequence, code: LinearCode, stripes: int = 1) -> StorageSystem:
    """Encode every stripe of every file with ``code``.

    A file may be given as ``stripes`` lists of ``k`` symbols or as one
    flat list of ``k * stripes`` symbols, stripe after stripe.
    """
    if stripes < 1:
        raise SimulationError("stripes must be >= 1")
    if not files:
        raise SimulationError("at least one file is required")
    p = code.field.p
    norm = tuple(_normalize_file(f, code.k, stripes, p, i) for i, f in enumerate(files))
    encoded = tuple(tuple(code.encode(stripe) for stripe in f) for f in norm)
    return StorageSystem(code, stripes, norm, encoded)


def random_files(field: PrimeField, m: int, k: int, stripes: int, seed: int) -> list[list[list[int]]]:
    rng = make_rng(seed)
    return [[uniform_elements(rng, field.p, k) for _ in range(stripes)] for _ in range(m)]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def uniform_elements(rng: np.random.Generator, p: int, count: int) -> list[int]:
    """``count`` exactly uniform residues mod ``p`` from raw 64-bit draws.

    Draws at or above the largest multiple of ``p`` below 2^64 are rejected.
    """
    limit = (2**64 // p) * p
    out = []
    while len(out) < count:
        raw = int(rng.bit_generator.random_raw())
        if raw < limit:
            out.append(raw % p)
    return out


def _inner(y: Sequence[int], q: Sequence[int], p: int) -> int:
    if len(y) != len(q):
        raise SimulationError(f"query length {len(q)} does not match stored length {len(y)}")
    return sum(int(a) * int(b) for a, b in zip(y, q)) % p


def server_respond(y_j: Sequence, q_j: Sequence, field: PrimeField) -> FieldElement:
    """Inner product of the stored column with the query."""
    return field(_inner([int(v) for v in y_j], [int(v) for v in q_j], field.p))


def _check_compatible(scheme: RetrievalScheme, system: StorageSystem):
    if scheme.storage_code != system.code or scheme.n != system.n:
        raise SimulationError("scheme and storage system use different storage codes")
    if scheme.blocks != system.stripes:
        raise SimulationError(f"scheme splits files into {scheme.blocks} blocks, storage has {system.stripes} stripes")


def gen_queries(scheme: RetrievalScheme, system: StorageSystem, i: int, rng: np.random.Generator) -> list[dict[int, tuple[int, ...]]]:
    """Per round, the query vector for every retained server (keyed by server label)."""
    _check_compatible(scheme, system)
    if not 0 <= i < system.m:
        raise SimulationError(f"file index {i} out of range for {system.m} files")
    p = system.field.p
    s = system.stripes
    d = scheme.retrieval_code
    servers = scheme.retained_servers
    out = []
    for rnd in scheme.rounds:
        columns = []
        for ell in range(system.m):
            for b in range(s):
                word = list(d.encode(uniform_elements(rng, p, d.k))) if d.k else [0] * d.n
                if ell == i:
                    for pos in rnd.block_supports[b]:
                        word[pos] = (word[pos] + 1) % p
                columns.append(word)
        out.append({srv: tuple(col[pos] for col in columns) for pos, srv in enumerate(servers)})
    return out


@dataclass
class Reconstruction:
    file: tuple[tuple[int, ...], ...] | None
    # (round, block, server label, coded symbol value)
    symbols: list[tuple[int, int, int, int]] = dc_field(default_factory=list)
    # (coefficients over the k file symbols, value) for partial downloads
    functionals: list[tuple[tuple[int, ...], int]] = dc_field(default_factory=list)


def _syndrome(h: Matrix, word: Sequence[int]) -> list[int]:
    p = h.field.p
    return [sum(a * b for a, b in zip(row, word)) % p for row in h.data]


def _decode_de(scheme: RetrievalScheme, responses: list[list[int]]) -> Reconstruction:
    h = scheme.response_check
    g = scheme.retained_code.gen
    per_block: dict[int, list[tuple[int, int]]] = {b: [] for b in range(scheme.blocks)}
    symbols = []
    for r, (rnd, resp) in enumerate(zip(scheme.rounds, responses)):
        syndrome = _syndrome(h, resp)
        cols = [sup[0] for sup in rnd.block_supports]
        try:
            values = h.columns(cols).solve(syndrome)
        except SingularSystemError as exc:
            raise ReconstructionError(f"round {r}: {exc}") from exc
        for b, (pos, v) in enumerate(zip(cols, values)):
            per_block[b].append((pos, v))
            symbols.append((r, b, scheme.retained_servers[pos], v))
    blocks = []
    for b in range(scheme.blocks):
        positions = [pos for pos, _ in per_block[b]]
        try:
            blocks.append(g.columns(positions).T.solve([v for _, v in per_block[b]]))
        except SingularSystemError as exc:
            raise ReconstructionError(f"block {b}: {exc}") from exc
    return Reconstruction(tuple(blocks), symbols)


def _decode_interference(scheme: RetrievalScheme, resp: list[int]) -> Reconstruction:
    """Learn the shared codeword ``uY`` from the randomness part, then peel each block."""
    g = scheme.retained_code.gen
    p = g.field.p
    rand = list(scheme.randomness_positions)
    try:
        u = g.columns(rand).T.solve([resp[j] for j in rand])
    except SingularSystemError as exc:
        raise ReconstructionError(f"randomness part: {exc}") from exc
    interference = g.vecmul(u)
    blocks, symbols = [], []
    for b, support in enumerate(scheme.rounds[0].block_supports):
        values = [(resp[j] - interference[j]) % p for j in support]
        try:
            blocks.append(g.columns(support).T.solve(values))
        except SingularSystemError as exc:
            raise ReconstructionError(f"block {b}: {exc}") from exc
        symbols.extend((0, b, scheme.retained_servers[j], v) for j, v in zip(support, values))
    return Reconstruction(tuple(blocks), symbols)


def _decode_functionals(scheme: RetrievalScheme, resp: list[int]) -> Reconstruction:
    """Partial download: the ``rank(G diag(e) H^T)`` linear functionals of the file."""
    code = scheme.retained_code
    h = code.parity_check
    e = scheme.rounds[0].e
    masked = code.gen.scale_columns(e) @ h.T
    syndrome = _syndrome(h, resp)
    _, _, pivots = masked.rref()
    cols = list(zip(*masked.data))
    return Reconstruction(None, functionals=[(tuple(cols[c]), syndrome[c]) for c in pivots])


def reconstruct(scheme: RetrievalScheme, responses: Sequence[Sequence[int]]) -> Reconstruction:
    """Recover the wanted file from per-round responses (ordered like ``retained_servers``)."""
    if len(responses) != len(scheme.rounds):
        raise ReconstructionError(f"expected responses for {len(scheme.rounds)} rounds, got {len(responses)}")
    width = len(scheme.retained_servers)
    for r, resp in enumerate(responses):
        if len(resp) != width or any(v is None for v in resp):
            raise ReconstructionError(f"round {r}: expected {width} responses")
    responses = [[int(v) for v in resp] for resp in responses]
    if scheme.kind in ("tpir", "infoset"):
        return _decode_de(scheme, responses)
    if not scheme.full_file:
        return _decode_functionals(scheme, responses[0])
    return _decode_interference(scheme, responses[0])


@dataclass
class RoundRecord:
    queries: dict[int, tuple[int, ...]]
    responses: dict[int, int]


@dataclass
class Transcript:
    file_index: int
    seed: int
    rounds: list[RoundRecord]
    reconstruction: Reconstruction
    expected: tuple[tuple[int, ...], ...]
    downloaded: int
    information_symbols: int
    modulus: int

    @property
    def matched(self) -> bool:
        rec = self.reconstruction
        if rec.file is not None:
            return rec.file == self.expected
        if not rec.functionals:
            return False
        (stripe,) = self.expected
        return all(sum(c * x for c, x in zip(coeffs, stripe)) % self.modulus == v for coeffs, v in rec.functionals)

    def to_json(self, one_based: bool = True) -> dict:
        off = 1 if one_based else 0
        rec = self.reconstruction
        return {
            "file_index": self.file_index,
            "seed": self.seed,
            "rounds": [
                {
                    "queries": {str(s + off): list(q) for s, q in rr.queries.items()},
                    "responses": {str(s + off): v for s, v in rr.responses.items()},
                    "decoded": [
                        {"block": b, "server": srv + off, "value": v}
                        for r, b, srv, v in rec.symbols
                        if r == idx
                    ],
                }
                for idx, rr in enumerate(self.rounds)
            ],
            "reconstructed": [list(s) for s in rec.file] if rec.file is not None else None,
            "functionals": [{"coefficients": list(c), "value": v} for c, v in rec.functionals],
            "expected": [list(s) for s in self.expected],
            "downloaded": self.downloaded,
            "information_symbols": self.information_symbols,
            "matched": self.matched,
        }


def run_retrieval(system: StorageSystem, scheme: RetrievalScheme, i: int, seed: int = 0) -> Transcript:
    """Run queries, responses and reconstruction for file ``i``; deterministic in ``seed``."""
    rng = make_rng(seed)
    queries = gen_queries(scheme, system, i, rng)
    p = system.field.p
    rounds, responses = [], []
    for q in queries:
        resp = {srv: _inner(system.server_column(srv), qj, p) for srv, qj in q.items()}
        rounds.append(RoundRecord(q, resp))
        responses.append([resp[srv] for srv in scheme.retained_servers])
    rec = reconstruct(scheme, responses)
    transcript = Transcript(
        file_index=i,
        seed=seed,
        rounds=rounds,
        reconstruction=rec,
        expected=system.files[i],
        downloaded=sum(len(r.responses) for r in rounds),
        information_symbols=scheme.information_symbols,
        modulus=p,
    )
    return transcript
