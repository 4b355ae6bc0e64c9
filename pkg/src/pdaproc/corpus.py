"""The bundled example corpus: specifications and PDAs used by the repro targets."""

from __future__ import annotations

from importlib import resources

from .core import Spec
from .parser import parse_pda, parse_spec
from .pda import Pda


def _root():
    return resources.files("pdaproc") / "data" / "corpus"


def names() -> list[str]:
    """File names of all corpus entries, sorted."""
    return sorted(p.name for p in _root().iterdir() if p.name.endswith((".pspec", ".pda")))


def text(name: str) -> str:
    return (_root() / name).read_text()


def load(name: str) -> Spec | Pda:
    """Parse a corpus entry; ``.pspec`` files give specs, ``.pda`` files PDAs."""
    src = text(name)
    return parse_spec(src) if name.endswith(".pspec") else parse_pda(src)
