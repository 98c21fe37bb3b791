"""Check records and verification reports shared by every stage."""

from dataclasses import dataclass, field, asdict
import json

PASS, FAIL, INFO, SKIP = "pass", "fail", "info", "skip"


@dataclass
class Check:
    id: str
    anchor: str
    result: str
    mode: str = "exhaustive"
    witness: object = None
    discrepancy: object = 0
    visited: int = 0
    detail: str = ""

    @property
    def ok(self):
        return self.result in (PASS, INFO)

    def to_dict(self):
        d = asdict(self)
        d["witness"] = _plain(self.witness)
        d["discrepancy"] = _plain(self.discrepancy)
        return d


def _plain(x):
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if hasattr(x, "item"):
        return x.item()
    if isinstance(x, (int, float, str, bool)) or x is None:
        return x
    return str(x)


def check(id, anchor, ok, witness=None, **kw):
    return Check(id, anchor, PASS if ok else FAIL, witness=None if ok else witness, **kw)


@dataclass
class Section:
    name: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    status: str = "run"          # "run" or "skip"
    error: str = ""

    def add(self, c):
        if any(x.id == c.id for x in self.checks):
            raise ValueError(f"duplicate check id {c.id!r} in section {self.name!r}")
        self.checks.append(c)
        return c

    def extend(self, cs):
        for c in cs:
            self.add(c)
        return self

    @property
    def ok(self):
        return self.status == "run" and not self.error and all(c.ok for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.ok]

    def get(self, id):
        for c in self.checks:
            if c.id == id:
                return c
        raise KeyError(id)

    def to_dict(self):
        return {"name": self.name, "status": self.status, "error": self.error,
                "data": _plain(self.data), "checks": [c.to_dict() for c in self.checks]}


@dataclass
class VerificationReport:
    fixture: str
    sections: list = field(default_factory=list)
    dims: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def section(self, name):
        for s in self.sections:
            if s.name == name:
                return s
        s = Section(name)
        self.sections.append(s)
        return s

    @property
    def ok(self):
        ran = [s for s in self.sections if s.status == "run"]
        return bool(ran) and all(s.ok for s in ran) and not any(s.status == SKIP and s.error for s in self.sections)

    def first_failure(self):
        for s in self.sections:
            if s.error:
                return f"{s.name}: {s.error}"
            for c in s.checks:
                if not c.ok:
                    return f"{s.name}.{c.id}"
        return None

    def to_dict(self):
        return {"fixture": self.fixture, "ok": self.ok, "dims": _plain(self.dims),
                "meta": _plain(self.meta), "sections": [s.to_dict() for s in self.sections]}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), ensure_ascii=False, **kw)

    @classmethod
    def from_dict(cls, d):
        rep = cls(d["fixture"], dims=d.get("dims", {}), meta=d.get("meta", {}))
        for sd in d.get("sections", []):
            s = Section(sd["name"], data=sd.get("data", {}), status=sd.get("status", "run"),
                        error=sd.get("error", ""))
            for cd in sd.get("checks", []):
                s.checks.append(Check(**cd))
            rep.sections.append(s)
        return rep

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))
