import json

import pytest

from mapforge import (InputError, LayerShape, Model, gemm_to_conv, load_model,
                      model_from_dict, total_macs, validate_layer)


def test_layer_input_footprint_derived():
    layer = LayerShape(name="a", K=4, C=3, Y=5, X=7, R=3, S=2, stride=2)
    assert layer.in_y == (5 - 1) * 2 + 3
    assert layer.in_x == (7 - 1) * 2 + 2


def test_validate_layer_minimal_ok():
    layer = LayerShape(name="a", K=1, C=1, Y=1, X=1, R=1, S=1, stride=1)
    assert validate_layer(layer) == []


def test_validate_layer_all_eights_ok():
    layer = LayerShape(name="a", K=8, C=8, Y=8, X=8, R=8, S=8, stride=8)
    assert validate_layer(layer) == []


def test_validate_layer_zero_stride():
    layer = LayerShape(name="a", K=1, C=1, Y=1, X=1, R=3, S=1, stride=0)
    problems = validate_layer(layer)
    assert problems and any("stride" in p for p in problems)


def test_validate_layer_zero_channel():
    layer = LayerShape(name="a", K=0, C=1, Y=1, X=1, R=1, S=1, stride=1)
    assert any("K" in p for p in validate_layer(layer))


def test_gemm_lowering_definition():
    layer = gemm_to_conv("g", 2, 3, 4)
    assert (layer.K, layer.C, layer.Y, layer.X, layer.R, layer.S,
            layer.stride) == (2, 4, 3, 1, 1, 1, 1)


def test_gemm_lowering_identity_case():
    layer = gemm_to_conv("g", 1, 1, 1)
    assert total_macs(layer) == 1


def test_gemm_lowering_mac_count_vs_brute_force():
    layer = gemm_to_conv("g", 8, 8, 8)
    n = 0
    for _ in range(8):
        for _ in range(8):
            for _ in range(8):
                n += 1
    assert total_macs(layer) == n == 512


def test_gemm_lowering_mac_identity_exhaustive():
    for m in range(1, 17):
        for n in range(1, 17):
            for k in range(1, 17):
                assert total_macs(gemm_to_conv("g", m, n, k)) == m * n * k


def test_total_macs_product():
    layer = LayerShape(name="a", K=4, C=2, Y=2, X=2, R=1, S=1, stride=1)
    assert total_macs(layer) == 32


def test_total_macs_resnet_stem():
    layer = LayerShape(name="a", K=64, C=3, Y=112, X=112, R=7, S=7, stride=2)
    assert total_macs(layer) == 118_013_952


def test_model_from_dict_conv_and_gemm():
    model = model_from_dict({
        "name": "m",
        "layers": [
            {"name": "c0", "type": "conv", "K": 64, "C": 3, "Y": 112,
             "X": 112, "R": 7, "S": 7, "stride": 2},
            {"name": "g0", "type": "gemm", "M": 8, "N": 8, "K": 8},
        ],
    })
    assert len(model.layers) == 2
    g = model.layers[1]
    assert (g.K, g.C, g.Y, g.X, g.R, g.S) == (8, 8, 8, 1, 1, 1)


def test_model_rejects_unknown_field():
    with pytest.raises(InputError) as err:
        model_from_dict({"name": "m", "layers": [
            {"name": "c0", "type": "conv", "K": 1, "C": 1, "Y": 1, "X": 1,
             "R": 1, "S": 1, "stride": 1, "pad": 3}]})
    assert "c0" in str(err.value) and "pad" in str(err.value)


def test_model_rejects_invalid_layer():
    with pytest.raises(InputError) as err:
        model_from_dict({"name": "m", "layers": [
            {"name": "c0", "type": "conv", "K": 0, "C": 1, "Y": 1, "X": 1,
             "R": 1, "S": 1, "stride": 1}]})
    assert "c0" in str(err.value)


def test_model_rejects_missing_field():
    with pytest.raises(InputError):
        model_from_dict({"name": "m", "layers": [
            {"name": "c0", "type": "conv", "K": 1, "C": 1, "Y": 1, "X": 1,
             "R": 1, "stride": 1}]})


def test_model_rejects_bool_dimension():
    with pytest.raises(InputError):
        model_from_dict({"name": "m", "layers": [
            {"name": "c0", "type": "conv", "K": True, "C": 1, "Y": 1, "X": 1,
             "R": 1, "S": 1, "stride": 1}]})


def test_model_rejects_duplicate_layer_names():
    layer = {"name": "c0", "type": "gemm", "M": 1, "N": 1, "K": 1}
    with pytest.raises(InputError):
        model_from_dict({"name": "m", "layers": [layer, dict(layer)]})


def test_model_requires_layers():
    with pytest.raises(InputError):
        model_from_dict({"name": "m", "layers": []})


def test_load_model_pure_function_of_bytes(tmp_path):
    doc = {"name": "m", "layers": [
        {"name": "c0", "type": "conv", "K": 2, "C": 2, "Y": 2, "X": 2,
         "R": 1, "S": 1, "stride": 1}]}
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    p1.write_text(json.dumps(doc))
    p2.write_text(json.dumps(doc))
    assert load_model(p1) == load_model(p2)


def test_load_model_malformed_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(InputError):
        load_model(p)


def test_model_type_is_immutable():
    model = Model(name="m", layers=(gemm_to_conv("g", 2, 2, 2),))
    with pytest.raises(AttributeError):
        model.name = "other"
