"""Invariant complex structures on the Iwasawa manifold."""

from .acstruct import J0, J1, InvalidACS, is_integrable, nijenhuis, orientation_D, orientation_total
from .cealgebra import KForm, ce_differential, lie_bracket, wedge
from .dolbeault import DolbeaultReport, dbar_matrices, dolbeault_report
from .echelon import (
    EchelonMinus,
    EchelonPlus,
    InfinityClass,
    J_from_echelon_minus,
    J_from_echelon_plus,
    echelon_minus_from_J,
    echelon_plus_from_J,
)
from .metricgeo import hemisphere_coords, is_orthogonal, sd_split, z_sphere_element
from .retract import PolarSplit, fiber_contract, homotopy_path, polar_retract, su2_minus_action
from .spectra import classify, orbit_dimension, spectrum

__version__ = "0.1.0"
