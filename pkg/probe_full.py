import json
import numpy as np
from diffeolab.config import DEFAULT_TOL
from diffeolab.modulus import holder
from diffeolab.reduction import make_config
import diffeolab.fixpoint as FP

tol = DEFAULT_TOL
cfg = make_config(2, holder(0.5), 4)
f = FP.calibrated_bump(1e-3, holder(0.5), k=2, tol=tol)

res = FP.fixed_point_search(f, cfg, tol=tol)
print("converged:", res.converged, " iterations:", res.iterations,
      " residual:", res.residual)
for t in res.trace:
    print("  ", {k: (round(v, 10) if isinstance(v, float) else v)
                 for k, v in t.items()})

chain = res.chain
s1 = FP.dump_chain(chain)
print("chain bytes:", len(s1))

# determinism: full second run
res2 = FP.fixed_point_search(f, cfg, tol=tol)
s2 = FP.dump_chain(res2.chain)
print("bitwise deterministic:", s1 == s2)

# verify
rep = FP.verify_certificate(json.loads(s1), tol)
print("verify ok:", rep["ok"])
for item in rep["items"]:
    print("  ", item["name"], "resid", f"{item['residual']:.3e}",
          "bound", f"{item['bound']:.1e}", "ok", item["ok"])

# tamper: bump one jet value of the witness map
bad = json.loads(s1)
bad["maps"]["witness"]["jets"][40][0] += 1e-3
rep2 = FP.verify_certificate(bad, tol)
print("tampered verify ok (should be False):", rep2["ok"])
