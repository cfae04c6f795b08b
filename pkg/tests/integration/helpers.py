from __future__ import annotations

# Cheap scenario for API round trips: no Lagrangian construction.
QUICK_SCENARIO = """
name = "quick_linear"
j = [2]
checks = ["holder_gate", "lipschitz", "residual"]

[group]
kind = "heisenberg"
k = 1

[field]
kind = "linear_x2"

[datum]
kind = "constant"
value = 1.0

[domain]
lower = [0.0, -1.0]
upper = [1.0, 1.0]
counts = [11, 21]
"""


def check_group(client, group: dict, **extra):
    return client.post("/api/groups/check", json={"group": group, **extra})


def verify(client, **body):
    return client.post("/api/scenarios/verify", json=body)


def verify_quick(client, archive: bool = False):
    response = verify(client, scenario=QUICK_SCENARIO, archive=archive)
    assert response.status_code == (201 if archive else 200)
    payload = response.get_json()
    assert isinstance(payload, dict)
    assert "report" in payload
    return payload


def record_statuses(report: dict) -> dict[str, str]:
    return {r["name"]: r["status"] for r in report["records"]}
