"""Shared fixtures: the reference configuration and small helpers."""

from pathlib import Path

import numpy as np
import pytest

from tumorsim import ModelParams, SchemeConfig, build_mesh, parse_config

REPO_ROOT = Path(__file__).resolve().parent.parent
REFERENCE_CONFIG = REPO_ROOT / "configs" / "breward_ref.json"


def reference_params() -> ModelParams:
    return ModelParams(
        k=1.0, mu=1.0, lam=1.0, Q=0.5, Q1hat=0.0,
        s1=10.0, s2=0.5, s3=0.5, s4=10.0, alphaR=0.8,
    )


def reference_config(T_final: float = 50.0) -> SchemeConfig:
    return SchemeConfig(
        h=0.05, delta=1e-3, ell0=1.0, ellm=10.0, alpha_thr=0.1, rho=0.1,
        a_star_lo=0.4, a_star_hi=0.82, m01=0.8, m02=0.8, T_final=T_final,
    )


def small_config(**overrides) -> SchemeConfig:
    base = dict(
        h=0.25, delta=0.01, ell0=1.0, ellm=2.0, alpha_thr=0.1, rho=0.1,
        a_star_lo=0.1, a_star_hi=0.9, m01=0.4, m02=0.8, T_final=1.0,
    )
    base.update(overrides)
    return SchemeConfig(**base)


@pytest.fixture(scope="session")
def ref_parsed():
    return parse_config(REFERENCE_CONFIG)


@pytest.fixture()
def ref_params():
    return reference_params()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture()
def small_mesh():
    return build_mesh(small_config())
