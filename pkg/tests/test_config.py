"""
Tests for run/sweep configuration parsing, overrides and normalization.
"""
import pytest
import yaml
from pydantic import ValidationError

from src.l2gd.compressors import CompressorKind
from src.l2gd.config import (
    RunConfig,
    apply_overrides,
    dump_config,
    load_raw,
    normalize_config,
    parse_run_config,
    parse_sweep_spec,
)
from src.l2gd.errors import ConfigError


class TestRunConfig:

    def test_defaults(self):
        config = parse_run_config({})
        assert config.algorithm == 'l2gd'
        assert config.probability == 0.5
        assert config.local_step_count == 1
        assert config.eta == 'auto'
        assert config.dataset.name == 'a1a'
        assert config.client_specs() == (config.client_compressor,) * 5

    def test_normalized_round_trip(self):
        """A dumped config parses back to the same normalized form."""
        raw = {'lam': 3, 'client_compressor': {'kind': 'bernoulli', 'q': 0.25}, 'dataset': {'source': 'synth'}}
        normalized = normalize_config(raw)
        assert normalize_config(yaml.safe_load(dump_config(parse_run_config(raw)))) == normalized
        assert normalized['client_compressor']['kind'] == 'bernoulli'
        assert normalized['lam'] == 3.

    def test_sweep_section_ignored_by_run(self):
        config = parse_run_config({'sweep': {'p': [0.2]}, 'lam': 1.})
        assert config.lam == 1.

    @pytest.mark.parametrize('raw', [
        {'local_steps': 2},
        {'algorithm': 'fedavg', 'p': 0.3, 'local_steps': 2},
        {'p': 1.},
        {'p': 0.},
        {'lam': -1.},
        {'eta': -0.1},
        {'iterations': 0},
        {'unknown_field': 1},
        {'client_compressor': {'kind': 'bernoulli', 'q': 0.}},
        {'client_compressor': {'kind': 'sign'}},
        {'loss': 'hinge'},
    ])
    def test_invalid(self, raw):
        with pytest.raises(ValidationError):
            parse_run_config(raw)

    def test_fedavg_local_steps(self):
        config = parse_run_config({'algorithm': 'fedavg', 'local_steps': 4})
        assert config.local_step_count == 4
        assert not config.coin_drawn_steps

    def test_fedavg_coin_drawn_steps(self):
        config = parse_run_config({'algorithm': 'fedavg', 'p': 0.3})
        assert config.coin_drawn_steps
        assert config.local_step_count is None
        assert config.probability == 0.3

    def test_with_values_revalidates(self):
        config = RunConfig()
        assert config.with_values(p=0.2).probability == 0.2
        with pytest.raises(ValidationError):
            config.with_values(p=2.)


class TestOverrides:

    def test_dotted_keys_and_yaml_values(self):
        raw = apply_overrides({'lam': 1.}, ['lam=5', 'client_compressor.kind=natural', 'track_optimum=false'])
        config = parse_run_config(raw)
        assert config.lam == 5.
        assert config.client_compressor.kind == CompressorKind.NATURAL
        assert config.track_optimum is False

    def test_does_not_mutate_input(self):
        raw = {'dataset': {'source': 'synth'}}
        apply_overrides(raw, ['dataset.d=3'])
        assert raw == {'dataset': {'source': 'synth'}}

    @pytest.mark.parametrize('item', ['lam', '=3', 'lam.x=1'])
    def test_malformed(self, item):
        with pytest.raises(ConfigError):
            apply_overrides({'lam': 1.}, [item])


class TestLoadRaw:

    def test_none_is_empty(self):
        assert load_raw(None) == {}

    def test_reads_yaml(self, tmp_path):
        path = tmp_path / 'run.yaml'
        path.write_text("lam: 2.0\ndataset:\n  source: synth\n")
        assert load_raw(str(path)) == {'lam': 2.0, 'dataset': {'source': 'synth'}}

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_raw(str(tmp_path / 'absent.yaml'))

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / 'bad.yaml'
        path.write_text("lam: [1, 2\n")
        with pytest.raises(ConfigError):
            load_raw(str(path))

    def test_top_level_must_be_mapping(self, tmp_path):
        path = tmp_path / 'list.yaml'
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError):
            load_raw(str(path))


class TestSweepSpec:

    def test_points_order(self):
        """Points enumerate p, then lambda, then seed."""
        spec = parse_sweep_spec({'seeds': 2, 'seed': 10, 'sweep': {'p': [0.2, 0.8], 'lam': [1., 5., 9.]}})
        points = spec.points()
        assert len(points) == 2 * 3 * 2
        assert [(p, l, s) for p, l, s, _ in points[:3]] == [(0, 0, 10), (0, 0, 11), (0, 1, 10)]
        _, _, seed, config = points[-1]
        assert (config.probability, config.lam, config.seed, config.seeds) == (0.8, 9., seed, 1)

    def test_default_grids(self):
        spec = parse_sweep_spec({'p': 0.3, 'lam': 2.})
        assert spec.p_grid == [0.3]
        assert spec.lam_grid == [2.]

    @pytest.mark.parametrize('raw', [
        {'sweep': {'p': [0.5, 1.]}},
        {'sweep': {'lam': [-1.]}},
        {'sweep': {'p': []}},
        {'algorithm': 'fedavg'},
    ])
    def test_invalid(self, raw):
        with pytest.raises(ValidationError):
            parse_sweep_spec(raw)
