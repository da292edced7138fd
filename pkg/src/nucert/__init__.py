"""Exact certificates for the multiplicity choice m_1..m_r on a projective surface."""
__version__ = "0.1.0"
