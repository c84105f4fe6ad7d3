"""Units, orders and class-number asymptotics for prime-degree number fields."""

from .chamber import AlphaVector, BoxSpec, Convention, GeodesicRecord, alpha_coords, constant_c, det_one_minus_ad_n, in_box, index_weight, psi
from .dirichlet import SeriesPoint, leading_term, partial_L, rescaled_partial
from .exactpoly import EmbeddingProfile, MonicIntPolynomial, discriminant, is_irreducible, isolate_roots, multiplicity_in_field
from .harvest import SweepConfig, ThetaAccumulator, coefficient_bounds, enumerate_units, sweep_ratios, theta_S
from .orderfield import NumberField, Order, OrderBasis, maximal_order, orders_between, splitting_type
from .unitlattice import ClassRegulatorData, UnitBasis, class_number, class_regulator_data, fundamental_units

__version__ = "0.1.0"

__all__ = [
    "AlphaVector", "BoxSpec", "Convention", "GeodesicRecord", "alpha_coords", "constant_c", "det_one_minus_ad_n",
    "in_box", "index_weight", "psi", "SeriesPoint", "leading_term", "partial_L", "rescaled_partial",
    "EmbeddingProfile", "MonicIntPolynomial", "discriminant", "is_irreducible", "isolate_roots",
    "multiplicity_in_field", "SweepConfig", "ThetaAccumulator", "coefficient_bounds", "enumerate_units",
    "sweep_ratios", "theta_S", "NumberField", "Order", "OrderBasis", "maximal_order", "orders_between",
    "splitting_type", "ClassRegulatorData", "UnitBasis", "class_number", "class_regulator_data", "fundamental_units",
]
