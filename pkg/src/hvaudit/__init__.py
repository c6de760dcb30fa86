"""Hidden-variable models of the two-photon polarization state and audits of them."""

__version__ = "0.1.0"
