"""Shared fixtures: the seed dataset and the two published discovery queries."""

from __future__ import annotations

import pytest

from semreg.fixtures import load_fixture_dataset

# Discovery queries as published (no PREFIX block; the engine's built-in
# vocabulary prefixes resolve the prefixed names).
QUERY_MODELS_FOR_CAMERA_DEVICE = """\
SELECT ?uuid ?MACs ?RAM ?Flash ?Description
WHERE {
    ?nn a nnet:NeuralNetwork ;
        schema:identifier ?uuid ;
        schema:description ?Description ;
        ssn:hasInput ?input;
        nnet:hasMultiplyAccumulateOps ?MACs ;
        s3n:hasProcedureFeature ?x_1 ;
        s3n:hasProcedureFeature ?x_2 .
    ?x_1 ssn-system:inCondition ?cond_1 .
    ?x_2 ssn-system:inCondition ?cond_2 .
    ?cond_1 a s3n_extend:RAM ;
        schema:minValue ?RAM ;
        schema:unitCode om:kilobyte .
    ?cond_2 a s3n_extend:Flash ;
        schema:minValue ?Flash ;
        schema:unitCode om:kilobyte .
    ?sensor ssn_extend:provideInput ?input;
        a sosa_extend:Camera .
    FILTER (?RAM <= 144)
    FILTER (?Flash <= 621)
}
"""

QUERY_DEVICES_FOR_MOTION_MODEL = """\
SELECT ?Device ?RAM ?Flash
WHERE {
    ?Device a s3n:SmartSensor ;
        ssn:hasSubSystem ?system_1 ;
        ssn:hasSubSystem ?system_2 ;
        ssn:hasSubSystem ?system_3 .
    ?system_1 a sosa_extend:Accelerometer .
    ?system_2 a sosa_extend:Gyroscope .
    ?system_3 a s3n:MicroController ;
        s3n:hasSystemCapability ?x .
    ?x ssn-system:hasSystemProperty ?cond_1 .
    ?x ssn-system:hasSystemProperty ?cond_2 .
    ?cond_1 a s3n_extend:RAM ;
        schema:value ?RAM ;
        schema:unitCode om:kilobyte .
    ?cond_2 a s3n_extend:Flash ;
        schema:value ?Flash ;
        schema:unitCode om:kilobyte .
    FILTER (?RAM >= 121)
    FILTER (?Flash >= 610)
}
ORDER BY ?RAM
"""

WORKPIECES_UUID = "2c8f6c2a-8c2e-4d14-9f6b-3a5d8e9c0f41"
CASTING_UUID = "49b2e7d1-5a0c-4c83-b7f2-91d4c3a8e6b0"
MOVE_UUID = "b7a1c9e3-2f4d-4b6a-8c1e-d5f7a9b3c0e2"
NPU_DEVICE_ID = "device_npu_01"

NPU_CONFIG = {
    "model_slot": 1,
    "input_source": "usb_camera",
    "execution_mode": "continuous",
    "confidence_threshold": 0.75,
    "class_labels": "red_workpiece,black_workpiece,metal_workpiece",
    "reject_label": "unknown",
    "preprocess_width": 96,
    "preprocess_height": 96,
    "output_variable_name": "ClassificationResult",
    "polling_interval_ms": 200,
    "struct_name": "ClassificationRecord",
    "function_block_name": "fbClassify",
    "data_block_name": "ControlData",
}


@pytest.fixture(scope="session")
def fixture_dataset():
    return load_fixture_dataset()
