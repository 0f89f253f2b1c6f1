"""Relational syllogistic logics: syntax, semantics, proofs and deciders."""

__version__ = "0.1.0"
