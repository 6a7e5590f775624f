"""JSON configuration: schema validation and construction of model objects."""

from functools import lru_cache
from importlib import resources
import json

import jsonschema

from .models import Rank0, Rank1, Rank2Simplex, Rank2Triangle
from .multivariate import MultiMaternSpec
from .spectral import DualMaternParams, MaternParams, PointMass, RadialMeasure, Tabulated

__all__ = ["ConfigError", "load_schema", "model_from_dict", "spec_from_dict", "measure_from_dict", "read_json"]

_MODELS = {"rank0": (Rank0, 1), "rank1": (Rank1, 2), "rank2_triangle": (Rank2Triangle, 3), "rank2_simplex": (Rank2Simplex, 5)}


class ConfigError(ValueError):
    """A configuration document is malformed."""


@lru_cache(maxsize=None)
def load_schema(name):
    """Bundled JSON schema ``name`` (``"model"`` or ``"multimatern"``)."""
    text = resources.files("maternfield").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def _check(doc, name):
    try:
        jsonschema.validate(doc, load_schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{name} config invalid at {where}: {exc.message}") from None


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None


def _density(d):
    kind = d["type"]
    if kind == "matern":
        return MaternParams(d["nu"], d["a"], d.get("sigma2", 1.0))
    if kind == "dual_matern":
        return DualMaternParams(d["nu"])
    if kind == "tabulated":
        return Tabulated(tuple(d["nodes"]), tuple(d["values"]))
    return PointMass(d["lambda0"], d.get("mass", 1.0))


def measure_from_dict(d, n_nodes=256, rho_max=None):
    """Build a :class:`RadialMeasure` from one ``measures`` entry."""
    try:
        dens = _density(d)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RadialMeasure.build(dens, atom0=d.get("atom0", 0.0), n_nodes=n_nodes, rho_max=rho_max)


def model_from_dict(doc, n_nodes=None, rho_max=None):
    """Validate a model document and build the model.

    ``n_nodes`` and ``rho_max`` override the document's ``grid`` entries.
    Grid construction may raise :class:`~maternfield.spectral.ConfigurationError`.
    """
    _check(doc, "model")
    cls, count = _MODELS[doc["model"]]
    measures = doc["measures"]
    if len(measures) != count:
        raise ConfigError(f"model {doc['model']} needs {count} measures, got {len(measures)}")
    grid = doc.get("grid", {})
    n_nodes = n_nodes if n_nodes is not None else grid.get("n_nodes", 256)
    rho_max = rho_max if rho_max is not None else grid.get("rho_max")
    ms = [measure_from_dict(m, n_nodes, rho_max) for m in measures]
    if cls is Rank0:
        return Rank0(ms[0])
    if cls is Rank1:
        return Rank1(*ms)
    return cls(tuple(ms))


def spec_from_dict(doc):
    """Validate a multivariate Matern document and build the specification."""
    _check(doc, "multimatern")
    try:
        if "parsimonious" in doc:
            p = doc["parsimonious"]
            if not len(p["nu"]) == len(p["sigma2"]) == len(p["beta"]):
                raise ConfigError("parsimonious nu, sigma2 and beta must have matching sizes")
            return MultiMaternSpec.parsimonious(p["nu"], p["a"], p["sigma2"], p["beta"])
        return MultiMaternSpec(doc["nu"], doc["a"], doc["sigma"], doc.get("beta"))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
