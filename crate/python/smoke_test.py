"""Smoke test for the crowdmind_py extension module.

Build and install first, e.g. `pip install --no-build-isolation ./crates/py`
or `maturin develop -m crates/py/Cargo.toml`.
"""

import math
import os
import tempfile

import crowdmind_py as cm


def main():
    ds, truth = cm.generate_scenario("grouped-walk", seed=3, noise=0.05)
    assert len(ds) == 8, len(ds)
    assert ds.frame_count == 100
    back = cm.TrackingDataset.parse(ds.to_text())
    assert back.to_text() == ds.to_text()
    assert truth.splitlines()[0] == "ped_id,group_id,mean_speed_mps,mean_heading_deg"

    assert cm.pair_term(0.0) == 1.0
    assert abs(cm.pair_term(4.34) - math.exp(-5.65068)) < 1e-12
    assert cm.long_term_orientation(30.0) == (70.0, 30.0)
    assert cm.collectivism_individualism(6, 10) == (60.0, 40.0)
    assert cm.power_distance(None) == 50.0

    emotions = cm.OceanProfile(extraversion=0.9).emotions()
    assert abs(emotions["happiness"] - 0.7) < 1e-12
    assert abs(emotions["anger"] - 0.4) < 1e-12

    net, report = cm.SocializationNet.train(samples=2000, seed=1, epochs=100)
    assert 0.0 <= net.socialization_level(0.8, 1.0, 3.0) <= 1.0
    assert report["validation_reference_accuracy"] > 0.8
    net2 = cm.SocializationNet.from_text(net.to_text())
    assert net2.to_text() == net.to_text()

    with tempfile.TemporaryDirectory() as root:
        inp = os.path.join(root, "in")
        os.makedirs(inp)
        with open(os.path.join(inp, "tracking.txt"), "w") as f:
            f.write(ds.to_text())
        net_path = os.path.join(root, "net.txt")
        with open(net_path, "w") as f:
            f.write(net.to_text())
        out = cm.analyze(inp, os.path.join(root, "out"), "smoke", 25.0, 50.0,
                         all_features=True, outputs=["txt", "chart", "overlay"], net=net_path)
        assert out["pedestrians"] == 8
        assert out["groups"] == 2
        assert all(0.0 <= v <= 100.0 for v in out["hofstede"].values())
        assert all(os.path.isfile(p) for p in out["files"])

    print("crowdmind_py smoke test passed")


if __name__ == "__main__":
    main()
