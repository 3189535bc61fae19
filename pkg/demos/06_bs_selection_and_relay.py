"""Second stage: which base station of the chosen network, and what relaying buys."""
from vecoffload.bs_select import classify_loss, classify_loss_relay, relay_destination, select_bs
from vecoffload.config import default_config
from vecoffload.core import Vehicle
from vecoffload.geometry import candidate_bs_set, sojourn

cfg = default_config()
pico = cfg.networks[2]
car = Vehicle(x=260.0, y=40.0, velocity=20.0, direction=1, transmit_power=0.2, local_compute_rate=15e9)

cands = candidate_bs_set(car, 2, cfg.networks)
bs = select_bs(cands, car)
geo = sojourn(car, bs)
print(f"{len(cands)} Pico stations in range; picked #{bs.index} at x={bs.x:.0f}, sojourn {geo.sojourn_time:.1f}s")

# a heavy task: 0.4 s upload, 12 s until the result is back
uplink, total = 0.4, 12.0
print("lost without relay:", bool(classify_loss(geo.sojourn_time, total)))
print("lost with relay   :", bool(classify_loss_relay(geo.sojourn_time, uplink)))
dest = relay_destination(car, pico, bs, cfg.area_length)
print(f"result forwarded over the backhaul to #{dest.index} at x={dest.x:.0f}")
