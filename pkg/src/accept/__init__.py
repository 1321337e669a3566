"""Consensus-free transaction settlement.

A fixed set of mutually silent validators signs transactions; a quorum of
signatures is a final, irreversible confirmation.  No ordering of
unrelated transactions, no randomness, no timing assumptions.
"""

__version__ = "0.1.0"
