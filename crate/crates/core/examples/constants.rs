//! Recomputes the frozen empirical constants used by the regression tests.
//! Run with `cargo run --release -p khinlab-core --example constants`.

use khinlab_core::montecarlo::{dyadic_hit_profile, sample, tail_hit_fraction};
use khinlab_core::psi::{constant_psi, normalize, power_psi};
use khinlab_core::rational::{fmt_rational, rat, to_f64, Rational};
use khinlab_core::sets::{measure_closed_form, window_measure, SetDescriptor, Variant};
use khinlab_core::target::Target;
use khinlab_core::torus::TorusBox;
use khinlab_core::verify::{overlap_ratio, quasi_independence_ratio};
use num_traits::One;

fn main() {
    let psi = normalize(
        power_psi(Rational::one(), rat(1, 2), 1u64 << 32).unwrap(),
        Rational::one(),
    )
    .unwrap();
    let target = Target::new((rat(1, 3), rat(2, 3)), rat(1, 2)).unwrap();
    let cap = 10_000;

    for qmax in [25u64, 50, 100] {
        let r = quasi_independence_ratio(qmax, &psi, &target, cap).unwrap();
        println!("R({qmax}) = {} ~ {:.6}", fmt_rational(&r), to_f64(&r));
    }

    let mut c_emp = Rational::one() * rat(0, 1);
    let mut arg = (0u64, 0u64);
    for q in 2..=100u64 {
        for r in 1..q {
            let v = overlap_ratio(q, r, &psi, &target, cap).unwrap();
            if v > c_emp {
                c_emp = v;
                arg = (q, r);
            }
        }
    }
    println!(
        "C_emp = {} ~ {:.6} at (q,r) = {arg:?}",
        fmt_rational(&c_emp),
        to_f64(&c_emp)
    );

    let run = sample(1000, 7).unwrap();
    let hit = tail_hit_fraction(&run, 100, 10_000, &psi, &target, Variant::Full).unwrap();
    println!(
        "tail_hit(100,10^4,N=10^3,seed=7,full) = {} ~ {:.4}",
        fmt_rational(&hit.fraction),
        to_f64(&hit.fraction)
    );

    let profile = dyadic_hit_profile(&run, 13, &psi, &target, Variant::Full).unwrap();
    for (k, f) in profile.iter().enumerate() {
        println!("dyadic k={k}: {} ~ {:.4}", fmt_rational(f), to_f64(f));
    }

    let t3 = Target::new((rat(1, 3), rat(2, 3)), rat(3, 1)).unwrap();
    let d = SetDescriptor::tilde(60, rat(1, 4), t3.y().clone(), t3.approximant(60).unwrap())
        .unwrap();
    let u = TorusBox::new((rat(1, 2), rat(1, 2)), (rat(1, 4), rat(1, 4))).unwrap();
    let w = window_measure(&d, &u, cap).unwrap();
    let full = measure_closed_form(&d).unwrap();
    let ratio = &w / (&full * u.area());
    println!(
        "window q=60: w = {}, ratio = {} ~ {:.4}",
        fmt_rational(&w),
        fmt_rational(&ratio),
        to_f64(&ratio)
    );

    // Sanity anchor for the constant-psi baseline used in several tests.
    let d0 = SetDescriptor::full(12, rat(1, 4), (rat(1, 3), rat(2, 3))).unwrap();
    assert_eq!(measure_closed_form(&d0).unwrap(), rat(1, 4));
    let _ = constant_psi(rat(1, 4));
}
