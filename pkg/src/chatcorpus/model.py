"""Core domain types: phone numbers, messages, groups and the corpus."""

from __future__ import annotations

import hashlib
import re
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from functools import cached_property
from importlib import resources
from typing import Iterable
from urllib.parse import unquote

NAMED_COUNTRIES = ("CO", "VE", "EC", "PE", "CL", "BR", "MX", "US")
MESSAGE_KINDS = ("text", "image", "video", "audio", "other")
MEDIA_KINDS = ("image", "video", "audio")


class MalformedNumberError(ValueError):
    pass


class UnidentifiableGroupError(ValueError):
    pass


class PrefixTableError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class CountryCode:
    tag: str
    prefix: str | None = None  # only set for OTHER

    def __str__(self) -> str:
        if self.tag == "OTHER":
            return f"OTHER({self.prefix})"
        return self.tag


UNKNOWN = CountryCode("UNKNOWN")


@dataclass(frozen=True, order=True)
class PhoneNumber:
    e164: str
    country: CountryCode
    national: str

    def __str__(self) -> str:
        return "+" + self.e164


class PrefixTable:
    """Prefix-free map from dialing prefix to country."""

    def __init__(self, entries: dict[str, str]):
        prefixes = sorted(entries)
        for a in prefixes:
            if not a.isdigit():
                raise PrefixTableError(f"non-numeric prefix {a!r}")
            for b in prefixes:
                if a != b and b.startswith(a):
                    raise PrefixTableError(f"prefix {a} is a prefix of {b}")
        self.entries = dict(entries)
        self._max_len = max((len(p) for p in prefixes), default=0)

    @classmethod
    def load(cls, path=None) -> "PrefixTable":
        if path is None:
            text = resources.files("chatcorpus.data").joinpath("country_prefixes.txt").read_text("utf-8")
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        entries = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                prefix, tag = (part.strip() for part in line.split(","))
            except ValueError:
                raise PrefixTableError(f"line {lineno}: expected '<prefix>,<tag>'") from None
            if prefix in entries:
                raise PrefixTableError(f"line {lineno}: duplicate prefix {prefix}")
            entries[prefix] = tag.upper()
        return cls(entries)

    def lookup(self, digits: str) -> tuple[CountryCode, str]:
        # prefix-free, so the first hit is the only hit
        for k in range(1, min(self._max_len, len(digits)) + 1):
            tag = self.entries.get(digits[:k])
            if tag is not None:
                code = CountryCode("OTHER", digits[:k]) if tag == "OTHER" else CountryCode(tag)
                return code, digits[k:]
        return UNKNOWN, digits


DEFAULT_PREFIXES = PrefixTable.load()


def parse_phone(raw: str, table: PrefixTable = DEFAULT_PREFIXES) -> PhoneNumber:
    """Parse ``+<digits>`` or bare digits into a country-resolved number."""
    s = raw.strip()
    digits = s[1:] if s.startswith("+") else s
    if not digits.isdigit() or not digits.isascii():
        raise MalformedNumberError(f"malformed phone number {raw!r}")
    if not 7 <= len(digits) <= 15:
        raise MalformedNumberError(f"phone number {raw!r} has {len(digits)} digits, expected 7-15")
    country, national = table.lookup(digits)
    return PhoneNumber(digits, country, national)


_ICON_UID = re.compile(r"(?:^|[?&])u=([0-9X]+-[0-9X]+)@g\.us")


def parse_uid_from_icon_url(url: str) -> str | None:
    """Group identifier embedded in a profile-picture link, if any."""
    m = _ICON_UID.search(unquote(url))
    return m.group(1) if m else None


def derive_uid(icon_uid: str | None, title: str | None) -> str:
    if icon_uid:
        return icon_uid
    if not title:
        raise UnidentifiableGroupError("group has neither icon uid nor title")
    return hashlib.sha256(title.encode("utf-8")).hexdigest()


def parse_time(value: str) -> datetime:
    """ISO-8601 to an aware UTC datetime; naive values are taken as UTC."""
    if value.endswith("Z"):
        value = value[:-1] + "+00:00"
    dt = datetime.fromisoformat(value)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_time(dt: datetime, minute: bool = False) -> str:
    dt = dt.astimezone(timezone.utc)
    if minute:
        return dt.strftime("%Y-%m-%dT%H:%MZ")
    return dt.isoformat().replace("+00:00", "Z")


def local_time(dt: datetime, tz_offset_hours: float) -> datetime:
    return dt.astimezone(timezone(timedelta(hours=tz_offset_hours)))


@dataclass(frozen=True)
class Provenance:
    server: str
    read_time: datetime


@dataclass(frozen=True)
class Message:
    id: str
    group_uid: str
    sender: PhoneNumber
    sent_time: datetime
    kind: str
    provenance: Provenance
    text: str | None = None
    media_hash: str | None = None
    media_duration_s: int | None = None
    has_emoji: bool = False
    forwarded: bool = False
    reply_to: str | None = None

    def content_identity(self):
        """What makes two copies of this message the same content.

        Media without a hash gets a per-object identity so it never matches.
        """
        if self.kind == "text":
            return ("text", self.text or "")
        if self.media_hash:
            return ("media", self.media_hash)
        if self.kind == "other" and self.text:
            return ("text", self.text)
        return ("unique", id(self))

    def key(self):
        return (self.group_uid, self.sender.e164, self.sent_time, self.content_identity())

    def identity_key(self):
        """Group-free key used to spot identical messages across groups."""
        return (self.sender.e164, self.sent_time, self.content_identity())


@dataclass(frozen=True)
class Group:
    uid: str
    title: str | None = None
    icon_uid: str | None = None
    merged_from: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.uid:
            raise ValueError("group uid must be non-empty")
        if self.uid in self.merged_from or len(set(self.merged_from)) != len(self.merged_from):
            raise ValueError(f"bad merge history for group {self.uid}")


@dataclass
class Corpus:
    groups: dict[str, Group]
    messages: list[Message] = field(default_factory=list)

    def __post_init__(self):
        for m in self.messages:
            if m.group_uid not in self.groups:
                raise KeyError(f"message {m.id} references unknown group {m.group_uid}")

    @cached_property
    def by_group(self) -> dict[str, list[Message]]:
        out: dict[str, list[Message]] = {uid: [] for uid in self.groups}
        for m in self.messages:
            out[m.group_uid].append(m)
        return out

    @cached_property
    def by_id(self) -> dict[str, Message]:
        out: dict[str, Message] = {}
        for m in self.messages:
            out.setdefault(m.id, m)
        return out

    @cached_property
    def membership(self) -> dict[str, frozenset[PhoneNumber]]:
        out: dict[str, set[PhoneNumber]] = defaultdict(set)
        for m in self.messages:
            out[m.group_uid].add(m.sender)
        return {uid: frozenset(out.get(uid, ())) for uid in self.groups}

    @cached_property
    def group_times(self) -> dict[str, list[datetime]]:
        return {uid: sorted(m.sent_time for m in ms) for uid, ms in self.by_group.items()}

    @cached_property
    def first_read(self) -> dict[str, datetime]:
        out: dict[str, datetime] = {}
        for m in self.messages:
            t = m.provenance.read_time
            if m.group_uid not in out or t < out[m.group_uid]:
                out[m.group_uid] = t
        return out

    def users(self) -> list[PhoneNumber]:
        return sorted({m.sender for m in self.messages}, key=lambda p: p.e164)

    def group_messages(self, uid: str) -> list[Message]:
        if uid not in self.groups:
            raise KeyError(f"unknown group {uid}")
        return self.by_group[uid]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.groups == other.groups and self.messages == other.messages


def sort_messages(messages: Iterable[Message]) -> list[Message]:
    """Chronological order; equal minutes keep their incoming order."""
    return sorted(messages, key=lambda m: m.sent_time)
