"""Pattern-based slot extraction for semi-structured catalog documents.

Rules are literal pre/post delimiter pairs: a filler is the maximal text
strictly between an occurrence of ``pre`` and the nearest following
occurrence of ``post``. Rule files are line oriented::

    # comment
    title: pre="<b>Title:</b> " post="<br>"
    comments: pre="Comment: " post=" End" multi

``\\"`` and ``\\\\`` are the only escapes inside the quoted patterns. A rule
without the ``multi`` flag defaults to first-match for ``title`` and the
pass-through extras, and to all-matches for every other slot.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .slots import CONTENT_SLOTS, RULE_SLOTS, SINGLE_MATCH_DEFAULT


class RuleConfigError(ValueError):
    """Raised for a malformed rule file; message carries the line number."""


@dataclass(frozen=True)
class ExtractionRule:
    slot: str
    pre: str
    post: str
    multi: bool

    def __post_init__(self) -> None:
        if self.slot not in RULE_SLOTS:
            raise RuleConfigError(f"unknown slot: {self.slot!r}")
        if not self.pre:
            raise RuleConfigError(f"rule for {self.slot!r} has an empty pre pattern")
        if not self.post:
            raise RuleConfigError(f"rule for {self.slot!r} has an empty post pattern")


@dataclass(frozen=True)
class ExtractionRuleSet:
    rules: tuple[ExtractionRule, ...]

    def __len__(self) -> int:
        return len(self.rules)

    def for_slot(self, slot: str) -> tuple[ExtractionRule, ...]:
        return tuple(r for r in self.rules if r.slot == slot)

    @property
    def slots(self) -> tuple[str, ...]:
        out: list[str] = []
        for rule in self.rules:
            if rule.slot not in out:
                out.append(rule.slot)
        return tuple(out)


@dataclass
class RawBookRecord:
    """Extracted slot fillers for one title, in document order per slot."""

    id: str
    fillers: dict[str, list[str]] = field(default_factory=dict)

    def get(self, slot: str) -> list[str]:
        return self.fillers.get(slot, [])

    @property
    def has_content(self) -> bool:
        """True when at least one synopsis, review, or comment was filled."""
        return any(self.fillers.get(slot) for slot in CONTENT_SLOTS)


_RULE_RE = re.compile(
    r'^(?P<slot>[A-Za-z][A-Za-z-]*)\s*:\s*'
    r'pre="(?P<pre>(?:[^"\\]|\\.)*)"\s+'
    r'post="(?P<post>(?:[^"\\]|\\.)*)"'
    r'(?P<multi>\s+multi)?$'
)


def _unescape(raw: str, lineno: int) -> str:
    out: list[str] = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == "\\":
            if i + 1 >= len(raw) or raw[i + 1] not in ('"', "\\"):
                raise RuleConfigError(f'line {lineno}: unsupported escape in pattern: {raw!r}')
            out.append(raw[i + 1])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def parse_rule_config(text: str) -> ExtractionRuleSet:
    """Parse a rule-config document into an ordered rule set."""
    rules: list[ExtractionRule] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _RULE_RE.match(stripped)
        if m is None:
            raise RuleConfigError(f"line {lineno}: cannot parse rule: {stripped!r}")
        slot = m.group("slot")
        if slot not in RULE_SLOTS:
            raise RuleConfigError(f"line {lineno}: unknown slot: {slot!r}")
        pre = _unescape(m.group("pre"), lineno)
        post = _unescape(m.group("post"), lineno)
        if not pre:
            raise RuleConfigError(f"line {lineno}: empty pre pattern")
        if not post:
            raise RuleConfigError(f"line {lineno}: empty post pattern")
        multi = bool(m.group("multi")) or slot not in SINGLE_MATCH_DEFAULT
        rules.append(ExtractionRule(slot=slot, pre=pre, post=post, multi=multi))
    return ExtractionRuleSet(rules=tuple(rules))


def load_rule_config(path: str | Path) -> ExtractionRuleSet:
    return parse_rule_config(Path(path).read_text(encoding="utf-8"))


_TAG_RE = re.compile(r"<[^>]*>")
_WS_RE = re.compile(r"\s+")


def normalize_filler(text: str) -> str:
    """Strip markup tags, collapse runs of whitespace, trim the ends."""
    return _WS_RE.sub(" ", _TAG_RE.sub(" ", text)).strip()


def _scan(doc: str, rule: ExtractionRule) -> list[tuple[int, str]]:
    # Left-to-right scan; multi collects non-overlapping (pre, filler, post)
    # spans by resuming after the consumed post pattern.
    matches: list[tuple[int, str]] = []
    pos = 0
    while True:
        start = doc.find(rule.pre, pos)
        if start < 0:
            break
        fill_start = start + len(rule.pre)
        end = doc.find(rule.post, fill_start)
        if end < 0:
            break
        matches.append((start, doc[fill_start:end]))
        if not rule.multi:
            break
        pos = end + len(rule.post)
    return matches


def extract_record(doc: str, record_id: str, rules: ExtractionRuleSet) -> RawBookRecord:
    """Apply every rule to a document; extraction is total and deterministic.

    Fillers for a slot with several rules are merged by position in the
    document so multi-valued slots keep document order.
    """
    spans: dict[str, list[tuple[int, int, str]]] = {slot: [] for slot in rules.slots}
    for rule_index, rule in enumerate(rules.rules):
        for start, raw in _scan(doc, rule):
            spans[rule.slot].append((start, rule_index, normalize_filler(raw)))
    fillers = {
        slot: [text for _, _, text in sorted(found)]
        for slot, found in spans.items()
    }
    return RawBookRecord(id=record_id, fillers=fillers)


def filter_adequate(records: Iterable[RawBookRecord]) -> list[RawBookRecord]:
    """Keep only records carrying at least one synopsis, review, or comment."""
    return [rec for rec in records if rec.has_content]


def iter_documents(path: str | Path) -> Iterator[tuple[str, str]]:
    """Yield (id, text) pairs from a document directory or a concatenated file.

    A directory yields one document per file (filename stem is the id, files
    in sorted order). A single file uses ``%%%<id>`` separator lines.
    """
    p = Path(path)
    if p.is_dir():
        for child in sorted(p.iterdir()):
            if child.is_file():
                yield child.stem, child.read_text(encoding="utf-8")
        return
    current_id: str | None = None
    buffer: list[str] = []
    for line in p.read_text(encoding="utf-8").splitlines(keepends=True):
        if line.startswith("%%%"):
            if current_id is not None:
                yield current_id, "".join(buffer)
            current_id = line[3:].strip()
            if not current_id:
                raise ValueError(f"{p}: separator line with empty id")
            buffer = []
        elif current_id is None:
            if line.strip():
                raise ValueError(f"{p}: content before the first %%% separator")
        else:
            buffer.append(line)
    if current_id is not None:
        yield current_id, "".join(buffer)


def write_records(records: Iterable[RawBookRecord], path: str | Path) -> int:
    """Write raw records as JSON Lines; returns the number written."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            doc = {"id": rec.id, "fillers": rec.fillers}
            fh.write(json.dumps(doc, ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")
            count += 1
    return count


def read_records(path: str | Path) -> list[RawBookRecord]:
    records: list[RawBookRecord] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                records.append(RawBookRecord(id=doc["id"], fillers=doc["fillers"]))
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad record line: {exc}") from exc
    return records
