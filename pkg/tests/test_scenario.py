"""Unit tests for scenario generation and task catalogs."""

from src.config import ScenarioConfig, config_from_dict
from src.simulation import TaskCatalog, generate_scenario, rsu_positions


class TestGenerateScenario:
    """Test suite for generate_scenario()."""

    def test_default_rsu_grid(self):
        """Test a 2000 m road with 500 m spacing gets RSUs at 250/750/1250/1750."""
        positions = rsu_positions(ScenarioConfig())

        assert [p.x for p in positions] == [250.0, 750.0, 1250.0, 1750.0]
        assert all((p.y, p.z) == (20.0, 10.0) for p in positions)

    def test_vehicles_placed_on_lanes(self, small_config):
        """Test vehicles sit at lane centers with speeds and capacities in range."""
        scenario = generate_scenario(small_config)
        lane_centers = {1.5, 4.5}

        assert len(scenario.registry.vehicles) == 6
        for vehicle in scenario.registry.vehicles.values():
            assert vehicle.position.y in lane_centers
            assert 0.0 <= vehicle.position.x < 1000.0
            assert 5.0 <= vehicle.speed <= 25.0
            assert 5e8 <= vehicle.compute_capacity <= 1e9

    def test_every_host_gets_a_server(self, small_config):
        """Test one edge server per RSU and per vehicle."""
        scenario = generate_scenario(small_config)

        assert sorted(scenario.servers) == [
            "M-R00", "M-R01",
            "M-V000", "M-V001", "M-V002", "M-V003", "M-V004", "M-V005",
        ]
        assert scenario.servers["M-R00"].committed == 0.0

    def test_one_initial_task_per_vehicle(self, small_config):
        """Test each vehicle starts with one task of 1-3 subtasks."""
        scenario = generate_scenario(small_config)

        owners = sorted(spec.owner for spec in scenario.initial_tasks.values())
        assert owners == scenario.vehicle_ids
        for spec in scenario.initial_tasks.values():
            assert 1 <= len(spec.subtasks) <= 3
            assert 0 <= spec.arrival_step <= 3
            assert spec.id.endswith("/T000")

    def test_same_seed_same_scenario(self, small_config):
        """Test regeneration with the same seed is identical."""
        first = generate_scenario(small_config)
        second = generate_scenario(small_config)

        assert first.registry.vehicles == second.registry.vehicles
        assert first.registry.rsus == second.registry.rsus
        assert first.initial_tasks == second.initial_tasks

    def test_different_seed_different_scenario(self, small_config):
        """Test another seed moves the vehicles."""
        other = small_config.with_overrides(seed=4)

        assert (
            generate_scenario(small_config).registry.vehicles
            != generate_scenario(other).registry.vehicles
        )

    def test_zero_vehicles(self, small_config_dict):
        """Test vehicle_count=0 gives an empty but valid scenario."""
        small_config_dict["scenario"]["vehicle_count"] = 0

        scenario = generate_scenario(config_from_dict(small_config_dict))

        assert scenario.vehicle_ids == []
        assert scenario.initial_tasks == {}
        assert len(scenario.servers) == 2


class TestTaskCatalog:
    """Test suite for TaskCatalog."""

    def test_task_sequence_is_order_independent(self, small_config):
        """Test later tasks do not depend on which tasks were asked for first."""
        ids = ["V000", "V001"]
        forward = TaskCatalog(small_config.tasks, 5, ids)
        backward = TaskCatalog(small_config.tasks, 5, ids)

        a = [forward.task("V000", 2, 0), forward.task("V001", 0, 0)]
        b = [backward.task("V001", 0, 0), backward.task("V000", 2, 0)]

        assert a == list(reversed(b))

    def test_arrival_step_is_stamped(self, small_config):
        """Test the same task can be stamped with different arrival steps."""
        catalog = TaskCatalog(small_config.tasks, 0, ["V000"])

        early = catalog.task("V000", 1, 4)
        late = catalog.task("V000", 1, 9)

        assert (early.arrival_step, late.arrival_step) == (4, 9)
        assert early.subtasks == late.subtasks
        assert early.id == "V000/T001"

    def test_constant_ranges(self, small_config_dict):
        """Test ranges with equal bounds produce constants."""
        small_config_dict["tasks"].update(
            {"workload_range": [2e9, 2e9], "lambda_range": [1.0, 1.0]}
        )
        cfg = config_from_dict(small_config_dict)

        spec = TaskCatalog(cfg.tasks, 0, ["V000"]).task("V000", 0, 0)

        assert all(s.workload == 2e9 and s.lam == 1.0 for s in spec.subtasks)

    def test_subtask_fields_in_range(self):
        """Test drawn subtasks respect every configured range."""
        cfg = ScenarioConfig()
        catalog = TaskCatalog(cfg.tasks, 1, ["V000"])

        for sequence in range(10):
            spec = catalog.task("V000", sequence, 0)
            assert 3 <= len(spec.subtasks) <= 8
            for sub in spec.subtasks:
                assert 1e9 <= sub.workload <= 4e9
                assert 0.5 <= sub.lam <= 1.0
                assert 1e6 <= sub.input_bits <= 2e7
