import random
from decimal import Decimal

import pytest

from semreg.catalog import (
    compile_device_manifest,
    compile_model_manifest,
    extract_devices,
    extract_models,
    vocab,
)
from semreg.errors import InvalidConstraintsError, UnknownDeviceError, UnknownModelError
from semreg.matchmaker import (
    DEVICES_FOR_MODEL,
    MODELS_FOR_DEVICE,
    MatchConstraints,
    compile_match_query,
    constraints_for_device,
    constraints_for_model,
    devices_for_model,
    models_for_device,
)
from semreg.rdf import Dataset
from semreg.sparql import evaluate, parse_query

from conftest import (
    MOVE_UUID,
    NPU_DEVICE_ID,
    QUERY_DEVICES_FOR_MOTION_MODEL,
    QUERY_MODELS_FOR_CAMERA_DEVICE,
    WORKPIECES_UUID,
    CASTING_UUID,
)
from matchgen import brute_force_pairs, random_kg


def test_npu_device_matches_exactly_the_published_pair(fixture_dataset):
    results = models_for_device(fixture_dataset, NPU_DEVICE_ID)
    assert [r.model_uuid for r in results] == [WORKPIECES_UUID, CASTING_UUID]
    assert [r.rank for r in results] == [1, 2]
    assert results[0].ram_margin_kb == Decimal(50)  # 144 - 94
    assert results[0].flash_margin_kb == Decimal(21)  # 621 - 600
    assert all(r.ram_margin_kb >= 0 and r.flash_margin_kb >= 0 for r in results)


def test_motion_model_matches_devices_in_ram_order(fixture_dataset):
    results = devices_for_model(fixture_dataset, MOVE_UUID)
    assert [r.device_id for r in results] == ["device_002", "device_003"]
    assert results[0].satisfied_sensors == frozenset({vocab.ACCELEROMETER, vocab.GYROSCOPE})


def test_unknown_ids_raise(fixture_dataset):
    with pytest.raises(UnknownDeviceError):
        models_for_device(fixture_dataset, "device_404")
    with pytest.raises(UnknownModelError):
        devices_for_model(fixture_dataset, "no-such-uuid")


def _tiny_kg(model_overrides=None, device_overrides=None):
    model = {
        "uuid": "m1",
        "name": "m1",
        "description": "d",
        "inputs": [{"sensor": "Camera"}],
        "macs": 10,
        "minRamKb": 100,
        "minFlashKb": 500,
    }
    device = {
        "id": "d1",
        "name": "d1",
        "sensors": ["Camera"],
        "ramKb": 100,
        "flashKb": 500,
    }
    model.update(model_overrides or {})
    device.update(device_overrides or {})
    return Dataset([compile_model_manifest(model), compile_device_manifest(device)])


def test_exact_resource_equality_matches_with_zero_margins():
    ds = _tiny_kg()
    results = devices_for_model(ds, "m1")
    assert len(results) == 1
    assert results[0].ram_margin_kb == 0
    assert results[0].flash_margin_kb == 0


def test_one_kilobyte_over_budget_excludes():
    ds = _tiny_kg(model_overrides={"minRamKb": 101})
    assert devices_for_model(ds, "m1") == []


def test_sensorless_device_runs_only_sensorless_models():
    models = [
        {"uuid": "needs_cam", "name": "a", "description": "d", "inputs": [{"sensor": "Camera"}],
         "macs": 1, "minRamKb": 1, "minFlashKb": 1},
        {"uuid": "needs_none", "name": "b", "description": "d", "inputs": [],
         "macs": 1, "minRamKb": 1, "minFlashKb": 1},
    ]
    device = {"id": "bare", "name": "bare", "sensors": [], "ramKb": 10**6, "flashKb": 10**6}
    ds = Dataset([compile_model_manifest(m) for m in models] + [compile_device_manifest(device)])
    assert [r.model_uuid for r in models_for_device(ds, "bare")] == ["needs_none"]


def test_depth_camera_satisfies_camera_requirement():
    ds = _tiny_kg(device_overrides={"sensors": ["DepthCamera"]})
    assert [r.device_id for r in devices_for_model(ds, "m1")] == ["d1"]
    # but a plain camera does not satisfy a depth-camera requirement
    ds2 = _tiny_kg(model_overrides={"inputs": [{"sensor": "DepthCamera"}]})
    assert devices_for_model(ds2, "m1") == []


def test_symmetry_between_directions(fixture_dataset):
    models, _ = extract_models(fixture_dataset)
    devices, _ = extract_devices(fixture_dataset)
    forward = {(r.model_uuid, r.device_id) for m in models for r in devices_for_model(fixture_dataset, m.uuid)}
    backward = {(r.model_uuid, r.device_id) for d in devices for r in models_for_device(fixture_dataset, d.id)}
    assert forward == backward


def test_monotonicity_increasing_ram_never_removes_matches():
    rng = random.Random(42)
    for _ in range(25):
        ds, models, devices = random_kg(rng, max_models=6, max_devices=1, multi_sensor=True)
        device = devices[0]
        before = {r.model_uuid for r in models_for_device(ds, device["id"])}
        bigger = dict(device, ramKb=device["ramKb"] + rng.randint(1, 100))
        ds2 = ds.with_graph(compile_device_manifest(bigger))
        after = {r.model_uuid for r in models_for_device(ds2, device["id"])}
        assert before <= after


# --- compiled queries -----------------------------------------------------------

def test_compiled_camera_query_is_structurally_the_published_one():
    constraints = MatchConstraints(
        max_ram_kb=144, max_flash_kb=621, required_sensor_classes=frozenset({vocab.CAMERA})
    )
    text = compile_match_query(MODELS_FOR_DEVICE, constraints)
    assert "FILTER (?RAM <= 144)" in text
    assert "FILTER (?Flash <= 621)" in text
    generated = parse_query(text)
    published = parse_query(QUERY_MODELS_FOR_CAMERA_DEVICE)
    assert set(generated.patterns) == set(published.patterns)
    assert generated.filters == published.filters
    assert [v.name for v in generated.projection] == [v.name for v in published.projection]


def test_compiled_motion_query_is_structurally_the_published_one():
    constraints = MatchConstraints(
        min_ram_kb=121,
        min_flash_kb=610,
        required_sensor_classes=frozenset({vocab.ACCELEROMETER, vocab.GYROSCOPE}),
    )
    text = compile_match_query(DEVICES_FOR_MODEL, constraints)
    assert "ORDER BY ?RAM" in text
    generated = parse_query(text)
    published = parse_query(QUERY_DEVICES_FOR_MOTION_MODEL)
    assert set(generated.patterns) == set(published.patterns)
    assert generated.filters == published.filters
    assert generated.order_by == published.order_by


def test_constraints_must_match_direction():
    with pytest.raises(InvalidConstraintsError):
        compile_match_query(MODELS_FOR_DEVICE, MatchConstraints(min_ram_kb=1, min_flash_kb=1))
    with pytest.raises(InvalidConstraintsError):
        compile_match_query(DEVICES_FOR_MODEL, MatchConstraints(max_ram_kb=1, max_flash_kb=1))
    with pytest.raises(InvalidConstraintsError):
        compile_match_query(
            MODELS_FOR_DEVICE,
            MatchConstraints(max_ram_kb=1, max_flash_kb=1, min_ram_kb=1, min_flash_kb=1),
        )
    with pytest.raises(InvalidConstraintsError):
        compile_match_query("sideways", MatchConstraints(max_ram_kb=1, max_flash_kb=1))


def test_fixture_queries_and_traversal_agree(fixture_dataset):
    devices, _ = extract_devices(fixture_dataset)
    npu = next(d for d in devices if d.id == NPU_DEVICE_ID)
    compiled = compile_match_query(MODELS_FOR_DEVICE, constraints_for_device(npu))
    table = evaluate(fixture_dataset, parse_query(compiled))
    from_query = {r["uuid"].lexical for r in table.rows}
    from_traversal = {r.model_uuid for r in models_for_device(fixture_dataset, NPU_DEVICE_ID)}
    assert from_query == from_traversal == {WORKPIECES_UUID, CASTING_UUID}


# --- three-way randomized equivalence (small here; acceptance runs >=1000) ------

def _uuid_set(table):
    return {row["uuid"].lexical for row in table.rows}


def _device_set(table):
    return {row["Device"].value.rsplit("/", 1)[1] for row in table.rows}


def check_three_way(ds, models, devices, multi_sensor: bool):
    extracted_models, _ = extract_models(ds)
    extracted_devices, _ = extract_devices(ds)
    oracle = brute_force_pairs(models, devices)

    for model in extracted_models:
        traversal = {(model.uuid, r.device_id) for r in devices_for_model(ds, model.uuid)}
        compiled = compile_match_query(DEVICES_FOR_MODEL, constraints_for_model(model))
        queried = {(model.uuid, d) for d in _device_set(evaluate(ds, parse_query(compiled)))}
        expected = {(m, d) for m, d in oracle if m == model.uuid}
        assert traversal == queried == expected, f"model {model.uuid}"

    if multi_sensor:
        return  # the camera-shaped query only covers single-input populations
    for device in extracted_devices:
        traversal = {(r.model_uuid, device.id) for r in models_for_device(ds, device.id)}
        compiled = compile_match_query(MODELS_FOR_DEVICE, constraints_for_device(device))
        queried = {(u, device.id) for u in _uuid_set(evaluate(ds, parse_query(compiled)))}
        expected = {(m, d) for m, d in oracle if d == device.id}
        assert traversal == queried == expected, f"device {device.id}"


def test_three_way_equivalence_sample_single_sensor():
    rng = random.Random(1234)
    for _ in range(30):
        ds, models, devices = random_kg(rng, multi_sensor=False)
        check_three_way(ds, models, devices, multi_sensor=False)


def test_three_way_equivalence_sample_multi_sensor_device_direction():
    rng = random.Random(5678)
    for _ in range(30):
        ds, models, devices = random_kg(rng, multi_sensor=True)
        check_three_way(ds, models, devices, multi_sensor=True)


# --- optional accuracy constraint ------------------------------------------------

def test_min_accuracy_filter_is_off_by_default(fixture_dataset):
    default = models_for_device(fixture_dataset, NPU_DEVICE_ID)
    strict = models_for_device(fixture_dataset, NPU_DEVICE_ID, min_accuracy=Decimal("0.93"))
    assert [r.model_uuid for r in default] == [WORKPIECES_UUID, CASTING_UUID]
    assert [r.model_uuid for r in strict] == [WORKPIECES_UUID]  # casting model is 0.91
