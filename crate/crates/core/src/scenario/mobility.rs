use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::trace::{Area, MobilityTrace, Waypoint};

/// Random-waypoint mobility without pauses: every node starts at a uniform
/// position and repeatedly travels in a straight line to a uniform
/// destination at a speed drawn from U(min_speed, max_speed). The last leg is
/// cut at `duration`.
pub fn generate_random_waypoint(area: Area, nodes: usize, duration: f64, speed: (f64, f64), seed: u64) -> MobilityTrace {
    let (min_speed, max_speed) = speed;
    assert!(min_speed > 0.0 && max_speed >= min_speed, "speed range must be positive");
    assert!(area.width > 0.0 && area.height > 0.0, "area must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tracks = (0..nodes)
        .map(|_| {
            let mut x = rng.random_range(0.0..=area.width);
            let mut y = rng.random_range(0.0..=area.height);
            let mut t = 0.0;
            let mut track = vec![Waypoint { time: 0.0, x, y }];
            while t < duration {
                let dx = rng.random_range(0.0..=area.width);
                let dy = rng.random_range(0.0..=area.height);
                let v = if max_speed > min_speed { rng.random_range(min_speed..=max_speed) } else { min_speed };
                let dist = (dx - x).hypot(dy - y);
                if dist < 1e-6 {
                    continue;
                }
                let travel = dist / v;
                if t + travel >= duration {
                    let f = (duration - t) / travel;
                    track.push(Waypoint { time: duration, x: x + f * (dx - x), y: y + f * (dy - y) });
                    break;
                }
                t += travel;
                x = dx;
                y = dy;
                track.push(Waypoint { time: t, x, y });
            }
            track
        })
        .collect();
    MobilityTrace { area: Some(area), tracks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::olsr::NodeId;

    const URBAN: (f64, f64) = (2.78, 13.88);

    #[test]
    fn leg_speeds_stay_in_bounds() {
        let area = Area::new(1200.0, 1200.0);
        let trace = generate_random_waypoint(area, 30, 180.0, URBAN, 7);
        trace.check(None).unwrap();
        for n in 0..30 {
            let track = &trace.tracks[n];
            assert_eq!(track.last().unwrap().time, 180.0);
            for v in trace.leg_speeds(NodeId(n as u32)) {
                assert!(v >= URBAN.0 * (1.0 - 1e-9) && v <= URBAN.1 * (1.0 + 1e-9), "speed {v}");
            }
        }
    }

    #[test]
    fn zero_duration_gives_single_waypoint() {
        let trace = generate_random_waypoint(Area::new(100.0, 100.0), 1, 0.0, URBAN, 1);
        assert_eq!(trace.tracks.len(), 1);
        assert_eq!(trace.tracks[0].len(), 1);
        assert_eq!(trace.tracks[0][0].time, 0.0);
    }

    #[test]
    fn seeded() {
        let area = Area::new(500.0, 300.0);
        assert_eq!(generate_random_waypoint(area, 5, 60.0, URBAN, 3), generate_random_waypoint(area, 5, 60.0, URBAN, 3));
        assert_ne!(generate_random_waypoint(area, 5, 60.0, URBAN, 3), generate_random_waypoint(area, 5, 60.0, URBAN, 4));
    }
}
