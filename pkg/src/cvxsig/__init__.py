"""Mutational signature extraction with NMF, convex NMF and its autoencoder twin."""

__version__ = "0.1.0"

from .core import FactorModel, FitConfig, Method, MutationCatalog, NonNegScheme, frobenius_loss, init_uniform
from .nmf import nmf_fit
from .cnmf import cnmf_fit
from .aenmf import aenmf_fit
from .metrics import match_signatures

__all__ = ["FactorModel", "FitConfig", "Method", "MutationCatalog", "NonNegScheme",
           "frobenius_loss", "init_uniform", "nmf_fit", "cnmf_fit", "aenmf_fit", "match_signatures"]
