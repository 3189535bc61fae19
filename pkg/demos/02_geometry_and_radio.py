"""How long a car stays under a base station, and how long an offloaded task takes."""
from vecoffload.config import default_config
from vecoffload.core import MB, AppKind, Task, Vehicle
from vecoffload.geometry import distance, sojourn
from vecoffload.radio import link_budget, offload_timing

cfg = default_config()
car = Vehicle(x=120.0, y=10.0, velocity=15.0, direction=1, transmit_power=0.2, local_compute_rate=15e9)
task = Task(upload_size=3 * MB, download_size=0.6 * MB, ops_per_byte=10e9 / MB, app_kind=AppKind.PROCESSING)

for net in cfg.networks:
    # nearest station of each tier
    bs = min(net.stations, key=lambda b: abs(b.x - car.x) + abs(b.y - car.y))
    try:
        geo = sojourn(car, bs)
    except ValueError:
        print(f"{net.name:>5}: station at x={bs.x:.0f} does not cover the lane")
        continue
    d = float(distance(car.position, bs))
    lb = link_budget(d, car.transmit_power, cfg.bs_transmit_power, net.bandwidth, cfg.noise_density)
    t = offload_timing(task, lb.uplink_rate, net.compute_rate, 2.0, lb.downlink_rate)
    print(f"{net.name:>5}: sojourn {geo.sojourn_time:5.1f}s  uplink {lb.uplink_rate / 1e6:6.1f} Mbit/s  "
          f"offload {t.total:5.2f}s (tx {t.transmit_time:.2f}, compute {t.compute_time:.2f}, wait 2.00)")
