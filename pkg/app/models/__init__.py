"""
Module models - Types de valeur du domaine
"""

from app.models.params import DirichletParams, SeedSpec, StreamLabel
from app.models.matrix import ChainRecord, DeflatedForm, ProbVector, StochasticMatrix
from app.models.spectrum import ExponentSample, SingularValues, Spectrum
from app.models.density import DensityFn, QuadratureSpec
from app.models.histogram import Histogram
from app.models.plot import PlotSpec, Series
from app.models.observations import TimeSlice


__all__ = [
    "DirichletParams",
    "SeedSpec",
    "StreamLabel",
    "ChainRecord",
    "DeflatedForm",
    "ProbVector",
    "StochasticMatrix",
    "ExponentSample",
    "SingularValues",
    "Spectrum",
    "DensityFn",
    "QuadratureSpec",
    "Histogram",
    "PlotSpec",
    "Series",
    "TimeSlice",
]
