"""Surfaces of revolution: curvature tensors, diameter, Topping's inequality and the capped Delaunay family."""

from .diameter import diameter_with_error, intrinsic_diameter, mesh_distances
from .export import curvature_csv, report_json, to_obj
from .invariants import (
    FundamentalData,
    ToppingReport,
    UmbilicalDeficit,
    UmbilicChain,
    commutator_symbol_sup,
    fd_covariant_derivative,
    fd_grad_II_norm,
    fd_principal_curvatures,
    fd_umbilical_deficit,
    fundamental_data,
    gauss_bonnet,
    geometry_report,
    grad_H,
    grad_II_norm,
    H_stddev,
    nearly_umbilical_chain,
    sup_grad_H,
    sup_grad_II,
    symbol_norm_constant,
    symbol_values,
    topping_report,
    umbilical_deficit,
)
from .profile import ProfileCurve, Roulette, smooth_step
from .surface import (
    RevolutionSurface,
    capped_delaunay,
    cylinder_surface,
    ellipsoid_surface,
    min_delaunay_resolution,
    sphere_surface,
)

__all__ = [
    "FundamentalData",
    "ProfileCurve",
    "RevolutionSurface",
    "Roulette",
    "ToppingReport",
    "UmbilicalDeficit",
    "UmbilicChain",
    "capped_delaunay",
    "commutator_symbol_sup",
    "curvature_csv",
    "cylinder_surface",
    "diameter_with_error",
    "ellipsoid_surface",
    "fd_covariant_derivative",
    "fd_grad_II_norm",
    "fd_principal_curvatures",
    "fd_umbilical_deficit",
    "fundamental_data",
    "gauss_bonnet",
    "geometry_report",
    "grad_H",
    "grad_II_norm",
    "H_stddev",
    "intrinsic_diameter",
    "mesh_distances",
    "min_delaunay_resolution",
    "nearly_umbilical_chain",
    "report_json",
    "smooth_step",
    "sphere_surface",
    "sup_grad_H",
    "sup_grad_II",
    "symbol_norm_constant",
    "symbol_values",
    "to_obj",
    "topping_report",
    "umbilical_deficit",
]
