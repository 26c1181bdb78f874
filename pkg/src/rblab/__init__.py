"""rblab: a randomized-benchmarking laboratory for small quantum systems."""

from . import analysis, groups, noise, qcore, rbengine, theory
from .compile import compile_gate, kak_compile, kak_decompose, recompose, zyz_decompose

__all__ = [
    "analysis",
    "compile_gate",
    "groups",
    "kak_compile",
    "kak_decompose",
    "noise",
    "qcore",
    "rbengine",
    "recompose",
    "theory",
    "zyz_decompose",
]

__version__ = "0.1.0"
