import os
import pathlib

import pytest

import umlforge

ROOT = pathlib.Path(__file__).resolve().parents[2]
DATA = ROOT / "data"

CUSTOMER_ORDER = """@startuml
class Customer {
  name
}
class Order {
  orderDate
}
Customer "1" -- "0..*" Order
@enduml
"""


def test_normalize_name():
    assert umlforge.normalize_name("Order_Items") == "order item"
    assert umlforge.normalize_name("  Categories ") == "category"


def test_parse_and_emit_round_trip():
    model, diagnostics = umlforge.parse_plantuml(CUSTOMER_ORDER)
    assert diagnostics == []
    assert sorted(c["name"] for c in model["classes"]) == ["Customer", "Order"]
    text = umlforge.emit_plantuml(model)
    assert 'Customer "1..1" -- "0..*" Order' in text
    assert umlforge.parse_plantuml(text)[0] == model


def test_parse_reports_diagnostics():
    model, diagnostics = umlforge.parse_plantuml("@startuml\nclass A {\n")
    assert any(severity == "error" for _, _, severity in diagnostics)
    model, diagnostics = umlforge.parse_plantuml("@startuml\nA -- B\n@enduml\n")
    assert model is not None
    with pytest.raises(umlforge.SchemaError):
        umlforge.emit_plantuml({"classes": [], "relationships": [{"source": "A", "target": "B"}]})


def test_reverse_engineer():
    model, warnings = umlforge.reverse_engineer(
        "CREATE TABLE Customers (id INT PRIMARY KEY, name TEXT);\n"
        "CREATE TABLE Orders (id INT PRIMARY KEY, customer_id INT NOT NULL REFERENCES Customers(id));\n"
    )
    assert warnings == []
    assert len(model["classes"]) == 2
    assert len(model["relationships"]) == 1
    with pytest.raises(umlforge.DdlError, match="line 1"):
        umlforge.reverse_engineer("CREATE TABLE a (x INT REFERENCES missing(id));")


def test_generate_requirements():
    document, trace = umlforge.generate_requirements(CUSTOMER_ORDER, domain_prefix="CO")
    assert document.splitlines()[2] == (
        "CO-F003: The system shall associate each instance of Order with 1..1 instances of Customer."
    )
    assert set(trace) == {"CO-F001", "CO-F002", "CO-F003"}
    with pytest.raises(umlforge.ConfigError):
        umlforge.generate_requirements(CUSTOMER_ORDER, domain_prefix="")


def test_evaluate_self_and_partial():
    gold = (DATA / "northwind" / "gold.puml").read_text()
    report = umlforge.evaluate(gold, gold)
    assert report["average"] == 1.0
    assert report["errors"] == []
    partial = umlforge.evaluate(CUSTOMER_ORDER, "@startuml\nclass Customer\n@enduml\n")
    assert partial["classes"]["recall"] == 0.5
    assert partial["classes"]["precision"] == 1.0


def test_run_cli_generate_with_mock(tmp_path):
    code, out, err = umlforge.run_cli(
        "generate", DATA / "northwind" / "requirements.txt",
        "--backend", "mock", "--fixtures", DATA / "northwind" / "mock",
        "--out", tmp_path / "bundle",
    )
    assert code == 0, err
    assert "21 classes" in out
    assert (tmp_path / "bundle" / "05_verified.puml").exists()


def test_run_cli_exit_codes(tmp_path, monkeypatch):
    code, _, err = umlforge.run_cli("reverse", tmp_path / "missing.sql", "--out", tmp_path / "x")
    assert code == 1 and "file not found" in err
    monkeypatch.delenv("NOMAD_API_KEY", raising=False)
    code, _, err = umlforge.run_cli(
        "generate", DATA / "northwind" / "requirements.txt",
        "--endpoint", "http://127.0.0.1:9/v1/chat/completions", "--model", "m", "--out", tmp_path / "b",
    )
    assert code == 2 and "NOMAD_API_KEY" in err
