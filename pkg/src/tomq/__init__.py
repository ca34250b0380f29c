"""Certain answers, frontiers, split-partners, unique characterisation and
exact learning for temporalised ontology-mediated path queries."""

__version__ = "0.1.0"
