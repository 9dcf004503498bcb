//! Closed-form tables: density, capacity, optimal order and error rates.

use neural_cliques::blurred::DistortionKind;
use neural_cliques::theory::{self, Form};
use neural_cliques::OrderProfile;

fn main() -> neural_cliques::Result<()> {
    let (chi, l) = (100, 64);
    println!("density after M messages");
    for m in [25_000.0, 50_000.0, 100_000.0, 200_000.0, 400_000.0] {
        let row: Vec<String> = [8, 12, 16, 20]
            .iter()
            .map(|&c| format!("c={c}: {:.3}", theory::expected_density(chi, l, c, m)))
            .collect();
        println!("  M={m:>7}  {}", row.join("  "));
    }

    for prof in [OrderProfile::constant(16), OrderProfile::range(12, 20)] {
        let cap = theory::capacity(chi, l, &prof, 0.0)?;
        println!(
            "orders {prof}: {:.1} bits per message, efficiency one at M={:.0}",
            cap.bits_per_message, cap.m_max
        );
    }

    for p0 in [1e-2, 1e-4, 1e-6] {
        let o = theory::optimal_order(chi, l, 0.25, p0);
        println!(
            "P0={p0:e}: best order {:.2} -> {}, M={:.0}",
            o.raw,
            o.rounded,
            theory::diversity_vs_order(chi, l, 0.25, p0, o.rounded)
        );
    }

    println!("error rates at c=12, three erased");
    for d in [0.1, 0.2, 0.3, 0.4] {
        println!(
            "  d={d}: blind {:.3e}  guided {:.3e}  swapped pairs {:.3e}  anagram {:.3e}",
            theory::p_error_blind(chi, l, 12, 3, d, Form::Exact),
            theory::p_error_guided(l, 12, 3, d),
            theory::p_error_distorted(12, d, DistortionKind::PairwisePermuted, Form::Exact),
            theory::p_error_distorted(12, d, DistortionKind::Anagram, Form::Exact),
        );
    }
    Ok(())
}
