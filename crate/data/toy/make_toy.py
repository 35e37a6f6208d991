"""Regenerates the toy city inputs in this directory.

A 5 x 4 grid of two-way streets at 400 m spacing, four TAZ quadrants, two bus
routes crossing near the center and a morning-peak OD table.
"""

import json
import os
import random

COLS, ROWS, SPACING = 5, 4, 400.0
HERE = os.path.dirname(os.path.abspath(__file__))


def node(r, c):
    return f"n{r}{c}"


def write(path, text):
    full = os.path.join(HERE, path)
    os.makedirs(os.path.dirname(full), exist_ok=True)
    with open(full, "w") as f:
        f.write(text)


def network():
    lines = ["# toy city: 5 x 4 grid, 400 m blocks"]
    for r in range(ROWS):
        for c in range(COLS):
            lines.append(f"node {node(r, c)} {c * SPACING:g} {r * SPACING:g}")
    for r in range(ROWS):
        for c in range(COLS):
            for dr, dc in ((0, 1), (1, 0)):
                r2, c2 = r + dr, c + dc
                if r2 >= ROWS or c2 >= COLS:
                    continue
                # row 1 and column 2 are the bus corridors
                arterial = (dr == 0 and r == 1) or (dc == 0 and c == 2)
                speed = 13.9 if arterial else 11.1
                a, b = node(r, c), node(r2, c2)
                lines.append(f"edge e_{a}_{b} {a} {b} {SPACING:g} {speed} 1")
                lines.append(f"edge e_{b}_{a} {b} {a} {SPACING:g} {speed} 1")
    write("network/toy.net", "\n".join(lines) + "\n")
    lo, xm, ym, hx, hy = -10.0, 900.0, 500.0, 1610.0, 1210.0
    taz = {
        "sw": [[lo, lo], [xm, lo], [xm, ym], [lo, ym]],
        "se": [[xm, lo], [hx, lo], [hx, ym], [xm, ym]],
        "nw": [[lo, ym], [xm, ym], [xm, hy], [lo, hy]],
        "ne": [[xm, ym], [hx, ym], [hx, hy], [xm, hy]],
    }
    write("network/toy.taz.json", json.dumps(taz, indent=2) + "\n")


def hms(t):
    return f"{t // 3600:02d}:{t % 3600 // 60:02d}:{t % 60:02d}"


def gtfs():
    stops = [
        ("S101", "Main & 1st", 200, 400),
        ("S102", "Main & 2nd", 600, 400),
        ("S103", "Main & 3rd", 1000, 400),
        ("S104", "Main & 4th", 1400, 400),
        ("S401", "Center & South", 800, 200),
        ("S402", "Center & Market", 800, 600),
        ("S403", "Center & North", 800, 1000),
    ]
    write(
        "gtfs/latest/stops.txt",
        "stop_id,stop_name,stop_x,stop_y\n" + "".join(f"{s},{n},{x},{y}\n" for s, n, x, y in stops),
    )
    write("gtfs/latest/routes.txt", "route_id,route_short_name\n1,1\n4,4\n")
    write(
        "gtfs/latest/calendar.txt",
        "service_id,monday,tuesday,wednesday,thursday,friday,saturday,sunday,start_date,end_date\n"
        "WK,1,1,1,1,1,0,0,20240101,20251231\nWE,0,0,0,0,0,1,1,20240101,20251231\n",
    )
    trips = ["route_id,service_id,trip_id,block_id"]
    times = ["trip_id,arrival_time,departure_time,stop_id,stop_sequence"]
    plans = [
        ("1", "101", ["S101", "S102", "S103", "S104"], [7 * 3600 + 300, 7 * 3600 + 1200, 7 * 3600 + 2100]),
        ("4", "102", ["S401", "S402", "S403"], [7 * 3600 + 600, 7 * 3600 + 1500, 7 * 3600 + 2400]),
    ]
    for route, block, seq, starts in plans:
        for k, start in enumerate(starts):
            trip = f"R{route}_{k + 1}"
            trips.append(f"{route},WK,{trip},{block}")
            t = start
            for i, stop in enumerate(seq):
                dwell = 0 if i in (0, len(seq) - 1) else 10
                times.append(f"{trip},{hms(t)},{hms(t + dwell)},{stop},{i + 1}")
                t += dwell + 40
    write("gtfs/latest/trips.txt", "\n".join(trips) + "\n")
    write("gtfs/latest/stop_times.txt", "\n".join(times) + "\n")


def demand():
    rng = random.Random(20240607)
    zones = ["ne", "nw", "se", "sw"]
    lines = ["# origin dest start end mode count"]
    person_left, vehicle_left = 200, 500
    cells = [(o, d) for o in zones for d in zones]
    rng.shuffle(cells)
    vehicle_share = {("sw", "se"): 8, ("sw", "ne"): 6, ("sw", "nw"): 6, ("nw", "se"): 3}
    weights = [vehicle_share.get(c, 1) for c in cells]
    total = sum(weights)
    for i, (o, d) in enumerate(cells):
        last = i == len(cells) - 1
        cars = vehicle_left if last else round(500 * weights[i] / total)
        vehicle_left -= cars
        persons = person_left if last else 200 // len(cells) + (1 if i % 2 else 0)
        person_left -= persons
        trucks, trailers = cars // 8, cars // 12
        lines.append(f"{o} {d} 25200 27900 car {cars - trucks - trailers}")
        lines.append(f"{o} {d} 25200 27900 truck {trucks}")
        lines.append(f"{o} {d} 25200 27900 trailer {trailers}")
        lines.append(f"{o} {d} 25200 30600 person {persons}")
    write("td/toy.od", "\n".join(lines) + "\n")


def catalog():
    types = {
        "vehicle_types": [
            {"id": "Gillig_103", "class": "bus", "propulsion": "diesel", "default": True,
             "length_m": 12.0, "passenger_capacity": 60},
            {"id": "Gillig_hybrid", "class": "bus", "propulsion": "hybrid",
             "length_m": 12.0, "passenger_capacity": 60},
            {"id": "BYD_K9", "class": "bus", "propulsion": "electric",
             "length_m": 12.0, "passenger_capacity": 55},
            {"id": "truck", "class": "truck", "max_speed_mps": 11.0},
            {"id": "trailer", "class": "trailer", "max_speed_mps": 9.0},
        ]
    }
    write("vehicle/buses.json", json.dumps(types, indent=2) + "\n")


if __name__ == "__main__":
    network()
    gtfs()
    demand()
    catalog()
