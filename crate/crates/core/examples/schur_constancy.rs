//! Cross-point constancy of nu, tau, tau' and (n+1)tau - 3tau'.

use curvlab::modelspaces::{make_cpn, make_s6};
use curvlab::verify::schur_check;

fn main() -> curvlab::Result<()> {
    for spec in [make_s6()?, make_cpn(3, 4.0)?] {
        let s = schur_check(&spec, 8, 11, 1e-6)?;
        println!("{} (n = {}): pass {}", spec.name, s.n, s.pass);
        for p in &s.points {
            println!(
                "  nu {:.10} / {:.10}  tau {:.8}  tau' {:.8}  (n+1)tau-3tau' {:.8}  |d nu| {:.1e}",
                p.nu_formula, p.nu_sampled, p.tau, p.tau_prime, p.lemma_quantity, p.grad_nu
            );
        }
        println!(
            "  spreads: nu {:.1e}, tau {:.1e}, tau' {:.1e}, lemma {:.1e}",
            s.spread_nu_formula, s.spread_tau, s.spread_tau_prime, s.spread_lemma_quantity
        );
        for w in &s.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
