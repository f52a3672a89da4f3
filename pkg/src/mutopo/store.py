"""Content-addressed persistent cache of enumerations and embedding verdicts.

Format: one JSON object per line in ``cache.jsonl``, each carrying a
``crc`` field with the CRC-32 of the rest of the line (the object minus
that field, serialized with sorted keys and compact separators).  The file
is append-only; compaction is explicit and rewrites it atomically.

Keys are canonical-form hashes plus the exact budget, so isomorphic seeds
share entries and differing budgets never collide.  A CLOSED enumeration
is additionally served to any request whose budget its recorded usage fits
inside, because an untripped run is a function of the seed alone; a
TRUNCATED record is served only on an exact budget match, which keeps warm
and cold results bit-identical.

Concurrency: single writer (guarded by an advisory lock file), any number
of readers; readers treat a trailing partial line as absent.
"""

from __future__ import annotations

import json
import os
import zlib
from pathlib import Path

from .canonical import canonical_form
from .classes import Budget, ClassEnumeration, Member, Verdict
from .embed import EmbedVerdict, EmbedWitness
from .matrix import apply_sequence, from_json_dict, to_json_dict

try:
    import fcntl
except ImportError:  # pragma: no cover - non-POSIX fallback
    fcntl = None

CACHE_FILE = "cache.jsonl"
LOCK_FILE = "cache.lock"
ENV_CACHE_DIR = "MUTOPO_CACHE_DIR"


class CorruptRecord(ValueError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"cache line {line_no}: {reason}")
        self.line_no = line_no


def _canonical_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def _with_crc(record: dict) -> str:
    crc = zlib.crc32(_canonical_line(record).encode("utf-8"))
    return _canonical_line({**record, "crc": crc})


def _budget_list(budget: Budget) -> list:
    return [budget.max_members, budget.max_entry, budget.max_depth]


def _budget_from_list(values) -> Budget:
    return Budget(values[0], values[1], values[2])


def _class_record(enum: ClassEnumeration) -> dict:
    return {
        "kind": "class",
        "seed": enum.seed.hash,
        "budget": _budget_list(enum.budget),
        "status": enum.status,
        "tripped": sorted(enum.tripped),
        "class_key": enum.least().form.hash,
        "stats": [enum.count, enum.max_abs_entry, enum.depth],
        "members": [
            [mem.form.hash, to_json_dict(mem.form.matrix), list(mem.witness)]
            for mem in enum.members
        ],
        "entry_witness": (
            to_json_dict(enum.entry_witness) if enum.entry_witness is not None else None
        ),
    }


def _class_from_record(record: dict, line_no: int) -> ClassEnumeration:
    seed_hash = record["seed"]
    seed_matrix = None
    for hash_, matrix_obj, _ in record["members"]:
        if hash_ == seed_hash:
            seed_matrix = from_json_dict(matrix_obj)
            break
    if seed_matrix is None:
        raise CorruptRecord(line_no, "seed hash is not among the members")
    members = []
    for hash_, matrix_obj, witness in record["members"]:
        matrix = from_json_dict(matrix_obj)
        form = canonical_form(matrix)
        if form.hash != hash_ or form.matrix != matrix:
            raise CorruptRecord(line_no, f"member {hash_[:12]} fails re-canonicalization")
        reached = apply_sequence(seed_matrix, witness)
        if canonical_form(reached).hash != hash_:
            raise CorruptRecord(line_no, f"member {hash_[:12]} witness fails to replay")
        members.append(Member(form, tuple(witness), reached))
    entry_witness = (
        from_json_dict(record["entry_witness"])
        if record.get("entry_witness") is not None
        else None
    )
    return ClassEnumeration(
        seed=canonical_form(seed_matrix),
        members=tuple(members),
        status=record["status"],
        tripped=frozenset(record["tripped"]),
        entry_witness=entry_witness,
        budget=_budget_from_list(record["budget"]),
    )


def _embed_record(p_hash: str, q_hash: str, ev: EmbedVerdict) -> dict:
    witness = None
    if ev.witness is not None:
        witness = {
            "q_sequence": list(ev.witness.q_sequence),
            "subset": list(ev.witness.subset),
            "p_sequence": list(ev.witness.p_sequence),
        }
    return {
        "kind": "embed",
        "p": p_hash,
        "q": q_hash,
        "budget": _budget_list(ev.budget),
        "verdict": ev.verdict.value,
        "witness": witness,
    }


def _embed_from_record(record: dict) -> EmbedVerdict:
    witness = None
    if record.get("witness") is not None:
        w = record["witness"]
        witness = EmbedWitness(
            tuple(w["q_sequence"]), tuple(w["subset"]), tuple(w["p_sequence"])
        )
    return EmbedVerdict(
        Verdict(record["verdict"]), witness, _budget_from_list(record["budget"])
    )


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME", "~/.cache")
    return Path(base).expanduser() / "mutopo"


class Store:
    """Append-only JSONL cache over one directory.

    Open writable (default) to record new results; the advisory lock file
    rejects a second concurrent writer.  Open with ``readonly=True`` to
    share a cache that another process may be writing.
    """

    def __init__(self, directory, readonly: bool = False):
        self.directory = Path(directory)
        self.path = self.directory / CACHE_FILE
        self.readonly = readonly
        self._lock_handle = None
        self._classes: dict[tuple[str, tuple], ClassEnumeration] = {}
        self._by_seed: dict[str, list[ClassEnumeration]] = {}
        self._embeds: dict[tuple[str, str, tuple], EmbedVerdict] = {}
        self._lines: dict[str, None] = {}  # canonical line -> marker, insertion ordered
        if not readonly:
            self.directory.mkdir(parents=True, exist_ok=True)
            self._acquire_lock()
        self._load()

    # -- lifecycle -------------------------------------------------------

    def _acquire_lock(self):
        handle = open(self.directory / LOCK_FILE, "w")
        if fcntl is not None:
            try:
                fcntl.flock(handle.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
            except OSError:
                handle.close()
                raise RuntimeError(
                    f"cache at {self.directory} is locked by another writer"
                ) from None
        self._lock_handle = handle

    def close(self):
        if self._lock_handle is not None:
            if fcntl is not None:
                fcntl.flock(self._lock_handle.fileno(), fcntl.LOCK_UN)
            self._lock_handle.close()
            self._lock_handle = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- loading ---------------------------------------------------------

    def _load(self):
        if not self.path.exists():
            return
        text = self.path.read_text(encoding="utf-8")
        if not text:
            return
        terminated = text.endswith("\n")
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        last = len(lines) - 1
        for line_no, line in enumerate(lines):
            is_partial_candidate = line_no == last and not terminated
            try:
                self._ingest(line, line_no + 1)
            except CorruptRecord:
                if is_partial_candidate:
                    break  # torn final write, treated as absent
                raise

    def _ingest(self, line: str, line_no: int):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorruptRecord(line_no, f"not valid JSON ({exc.msg})") from None
        if not isinstance(obj, dict) or "crc" not in obj:
            raise CorruptRecord(line_no, "missing crc field")
        crc = obj.pop("crc")
        if zlib.crc32(_canonical_line(obj).encode("utf-8")) != crc:
            raise CorruptRecord(line_no, "checksum mismatch")
        kind = obj.get("kind")
        if kind == "class":
            enum = _class_from_record(obj, line_no)
            self._index_class(obj, enum)
        elif kind == "embed":
            self._embeds[(obj["p"], obj["q"], tuple(obj["budget"]))] = _embed_from_record(obj)
        else:
            raise CorruptRecord(line_no, f"unknown record kind {kind!r}")
        self._lines[_canonical_line(obj)] = None

    def _index_class(self, record: dict, enum: ClassEnumeration):
        key = (record["seed"], tuple(record["budget"]))
        self._classes[key] = enum
        self._by_seed.setdefault(record["seed"], []).append(enum)

    # -- class records -----------------------------------------------------

    def get_class(self, seed_hash: str, budget: Budget) -> ClassEnumeration | None:
        exact = self._classes.get((seed_hash, budget.key()))
        if exact is not None:
            return exact
        for enum in self._by_seed.get(seed_hash, ()):
            if enum.status != "CLOSED":
                continue
            fits = (
                enum.count <= budget.max_members
                and enum.max_abs_entry <= budget.max_entry
                and (budget.max_depth is None or enum.depth + 1 <= budget.max_depth)
            )
            if fits:
                return ClassEnumeration(
                    enum.seed, enum.members, enum.status, enum.tripped,
                    enum.entry_witness, budget,
                )
        return None

    def put_class(self, enum: ClassEnumeration):
        self._write(_class_record(enum), lambda rec: self._index_class(rec, enum))

    # -- embed records ------------------------------------------------------

    def get_embed(self, p_hash: str, q_hash: str, budget: Budget) -> EmbedVerdict | None:
        return self._embeds.get((p_hash, q_hash, budget.key()))

    def put_embed(self, p_hash: str, q_hash: str, ev: EmbedVerdict):
        record = _embed_record(p_hash, q_hash, ev)
        self._write(
            record,
            lambda rec: self._embeds.__setitem__(
                (rec["p"], rec["q"], tuple(rec["budget"])), ev
            ),
        )

    def _write(self, record: dict, index):
        line = _canonical_line(record)
        if line in self._lines:
            return  # idempotent re-put
        index(record)
        self._lines[line] = None
        if self.readonly:
            return
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(_with_crc(record) + "\n")
            f.flush()

    # -- maintenance --------------------------------------------------------

    def compact(self) -> dict:
        """Drop records whose budget another record for the same key strictly
        dominates, then rewrite the file atomically."""
        records = [json.loads(line) for line in self._lines]
        by_identity: dict[tuple, list[dict]] = {}
        for rec in records:
            if rec["kind"] == "class":
                ident = ("class", rec["seed"])
            else:
                ident = ("embed", rec["p"], rec["q"])
            by_identity.setdefault(ident, []).append(rec)

        def dominated(a, b) -> bool:
            # budget a strictly below budget b, componentwise (None depth = unbounded)
            am, ae, ad = a
            bm, be, bd = b
            le = (
                am <= bm
                and ae <= be
                and (bd is None or (ad is not None and ad <= bd))
            )
            return le and (am, ae, ad) != (bm, be, bd)

        kept_lines = []
        dropped = 0
        for rec in records:
            ident = ("class", rec["seed"]) if rec["kind"] == "class" else (
                "embed", rec["p"], rec["q"]
            )
            budgets = [tuple(r["budget"]) for r in by_identity[ident]]
            if any(dominated(tuple(rec["budget"]), other) for other in budgets):
                dropped += 1
                continue
            kept_lines.append(_with_crc(rec))
        before = self.path.stat().st_size if self.path.exists() else 0
        if not self.readonly:
            tmp = self.path.with_suffix(".jsonl.tmp")
            tmp.write_text("".join(line + "\n" for line in kept_lines), encoding="utf-8")
            os.replace(tmp, self.path)
        after = self.path.stat().st_size if self.path.exists() else 0
        stats = {
            "records": len(records),
            "kept": len(kept_lines),
            "dropped": dropped,
            "bytes_before": before,
            "bytes_after": after,
        }
        # rebuild indexes from the kept lines
        self._classes.clear()
        self._by_seed.clear()
        self._embeds.clear()
        self._lines.clear()
        for line_no, line in enumerate(kept_lines, start=1):
            self._ingest(line, line_no)
        return stats

    def stats(self) -> dict:
        return {
            "records": len(self._lines),
            "classes": len(self._classes),
            "embeds": len(self._embeds),
            "path": str(self.path),
        }
