import json
import math

import pytest

from mbx4.config import (analytic_z_values, apply_resolution, build_grid,
                         build_medium, build_pulses, build_solver_config,
                         build_soliton_params, config_hash, dump_config,
                         load_config, output_dir)
from mbx4.core import DomainError, SchemaError
from mbx4 import presets


@pytest.fixture
def sim_doc():
    return presets.fig2_config()


@pytest.fixture
def analytic_doc():
    return presets.analytic_example_config()


class TestRoundTrip:
    def test_parse_dump_parse_identity(self, sim_doc, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(dump_config(sim_doc))
        loaded = load_config(path)
        assert loaded == sim_doc
        path.write_text(dump_config(loaded))
        assert load_config(path) == loaded

    def test_hash_stable_under_key_order(self, sim_doc):
        shuffled = json.loads(json.dumps(sim_doc, sort_keys=True))
        assert config_hash(sim_doc) == config_hash(shuffled)

    def test_hash_changes_with_content(self, sim_doc):
        other = json.loads(json.dumps(sim_doc))
        other["medium"]["mu"] = 2.0
        assert config_hash(other) != config_hash(sim_doc)


class TestSchemaValidation:
    def test_missing_section_named(self, sim_doc):
        del sim_doc["grid"]
        with pytest.raises(SchemaError, match="missing key: grid"):
            build_grid(sim_doc)

    def test_missing_scalar_named(self, sim_doc):
        del sim_doc["grid"]["n_t"]
        with pytest.raises(SchemaError, match="missing key: grid.n_t"):
            build_grid(sim_doc)

    def test_missing_tau_named(self, analytic_doc):
        del analytic_doc["soliton"]["tau"]
        grid = build_grid(analytic_doc)
        medium = build_medium(analytic_doc, grid)
        with pytest.raises(SchemaError, match="soliton.tau"):
            build_soliton_params(analytic_doc, medium)

    def test_wrong_type_reported(self, sim_doc):
        sim_doc["medium"]["mu"] = "strong"
        grid = build_grid(sim_doc)
        with pytest.raises(SchemaError, match="medium.mu"):
            build_medium(sim_doc, grid)

    def test_bool_is_not_a_number(self, sim_doc):
        sim_doc["grid"]["t_min"] = True
        with pytest.raises(SchemaError, match="grid.t_min"):
            build_grid(sim_doc)

    def test_pulses_must_be_nonempty(self, sim_doc):
        sim_doc["pulses"] = []
        with pytest.raises(SchemaError, match="pulses"):
            build_pulses(sim_doc)

    def test_domain_violation_is_not_schema(self, sim_doc):
        sim_doc["medium"]["alpha_sq"] = 0.9  # alpha+beta != 1
        grid = build_grid(sim_doc)
        with pytest.raises(DomainError):
            build_medium(sim_doc, grid)

    def test_t2_star_null_and_inf_are_sharp(self, sim_doc):
        grid = build_grid(sim_doc)
        sim_doc["medium"]["t2_star"] = None
        sim_doc["medium"]["n_detuning"] = 1
        assert build_medium(sim_doc, grid).sharp_line
        sim_doc["medium"]["t2_star"] = math.inf
        assert build_medium(sim_doc, grid).sharp_line

    def test_z_values_exclusive(self, analytic_doc):
        analytic_doc["z_values"] = [1.0]
        with pytest.raises(SchemaError, match="exactly one"):
            analytic_z_values(analytic_doc, kappa=0.5)
        del analytic_doc["z_values"]
        del analytic_doc["kappa_z_values"]
        with pytest.raises(SchemaError, match="exactly one"):
            analytic_z_values(analytic_doc, kappa=0.5)

    def test_kappa_scaling(self, analytic_doc):
        values = analytic_z_values(analytic_doc, kappa=0.5)
        assert values == [-16.0, 0.0, 16.0]

    def test_solver_defaults(self):
        cfg = build_solver_config({})
        assert cfg.scheme == "heun"
        assert cfg.stability_policy == "warn"

    def test_output_dir_override(self, sim_doc):
        assert output_dir(sim_doc) == "out/fig2"
        assert output_dir(sim_doc, "elsewhere") == "elsewhere"


class TestResolutionScaling:
    def test_low_halves(self, sim_doc):
        low = apply_resolution(sim_doc, "low")
        assert low["grid"]["n_t"] == sim_doc["grid"]["n_t"] // 2
        assert low["grid"]["n_z"] == sim_doc["grid"]["n_z"] // 2
        assert sim_doc["grid"]["n_t"] == 3328  # original untouched

    def test_high_doubles(self, sim_doc):
        high = apply_resolution(sim_doc, "high")
        assert high["grid"]["n_t"] == 2 * sim_doc["grid"]["n_t"]

    def test_default_identity(self, sim_doc):
        assert apply_resolution(sim_doc, "default") == sim_doc

    def test_unknown_rejected(self, sim_doc):
        with pytest.raises(SchemaError, match="resolution"):
            apply_resolution(sim_doc, "ultra")


class TestShippedConfigs:
    @pytest.mark.parametrize("name,builder", [
        ("fig2_broadened", presets.fig2_config),
        ("fig2_sharpline", presets.fig2_sharpline_config),
        ("analytic_example", presets.analytic_example_config),
    ])
    def test_files_match_presets(self, name, builder):
        import pathlib
        path = pathlib.Path(__file__).resolve().parents[1] / "configs" / f"{name}.json"
        assert json.loads(path.read_text()) == builder()
