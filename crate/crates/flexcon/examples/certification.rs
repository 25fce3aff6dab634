//! Certifies the gain-ratio bounds of the approximate (>= 1/2, optimistic)
//! and robust (>= 1/3, pessimistic) menus on randomly generated markets.

use flexcon::{design, instances};

fn main() -> flexcon::Result<()> {
    let set = instances::certification_set(2024, 200);
    let (mut lo_opt, mut lo_pes) = (f64::INFINITY, f64::INFINITY);
    let mut undefined = 0;
    for inst in &set {
        let cert = design::certify_bounds(&inst.params, &inst.dist)?;
        match (cert.optimistic_ratio, cert.pessimistic_ratio) {
            (Some(a), Some(b)) => {
                lo_opt = lo_opt.min(a);
                lo_pes = lo_pes.min(b);
            }
            _ => undefined += 1,
        }
    }
    println!("{} random markets, {undefined} with an undefined ratio", set.len());
    println!("smallest optimistic ratio  {lo_opt:.4}");
    println!("smallest pessimistic ratio {lo_pes:.4}");
    Ok(())
}
