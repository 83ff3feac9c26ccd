"""Walk the HTTP service end to end, in process.

The same flow works against a real server (`buildopt serve --port 8080`);
the test client just spares the demo a subprocess. Jobs are asynchronous:
POST returns an id, progress comes from polling, results are immutable and
cached by request fingerprint.
"""

import time

from fastapi.testclient import TestClient

from buildopt.service import create_app

client = TestClient(create_app(state_dir="service_state"))

materials = client.get("/materials").json()["materials"]
print(f"GET /materials -> {len(materials)} entries")

scenario = {"exclude_materials": ["So1"], "solver": {"starts": 8}}
fp = client.post("/scenario", json=scenario).json()["fingerprint"]
print(f"POST /scenario -> fingerprint {fp}")

job = client.post("/pareto", json={
    "scenario": scenario,
    "budget_min": 6200.0, "budget_max": 7000.0, "steps": 6,
}).json()
print(f"POST /pareto -> job {job['id'][:12]}… status={job['status']}")

while True:
    job = client.get(f"/jobs/{job['id']}").json()
    done, total = job["progress"]["done"], job["progress"]["total"]
    print(f"  polling: {job['status']} ({done}/{total})")
    if job["status"] in ("done", "infeasible", "failed"):
        break
    time.sleep(2.0)

front = job["result"]["front"]
print(f"front has {len(front['points'])} points, "
      f"clusters {[c['label'] for c in front['clusters']]}")

shifted = client.post("/price-what-if", json={
    "job_id": job["id"], "material": "So2", "price": 200.0,
}).json()["front"]
print(f"price what-if at 200 $/m3 keeps {len(shifted['points'])} points")

again = client.post("/pareto", json={
    "scenario": scenario,
    "budget_min": 6200.0, "budget_max": 7000.0, "steps": 6,
}).json()
print(f"identical request -> same job, already {again['status']} "
      f"(results are cached under results/{fp}/)")
