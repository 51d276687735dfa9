use std::time::Instant;

use deformkit::selftest::criterion;

const LIMITS: [u64; 10] = [60, 120, 5, 120, 30, 120, 180, 60, 30, 300];

fn main() {
    let mut failed = Vec::new();
    for id in 1..=10u32 {
        let t = Instant::now();
        let r = criterion(id, 0);
        let secs = t.elapsed().as_secs_f64();
        let ok = r.pass && secs <= LIMITS[id as usize - 1] as f64;
        println!(
            "criterion {:>2} {:<32} {} ({} instances, {:.1}s, limit {}s) {}",
            id,
            r.name,
            if ok { "PASS" } else { "FAIL" },
            r.instances,
            secs,
            LIMITS[id as usize - 1],
            r.detail
        );
        if !ok {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {:?}", failed);
        std::process::exit(1);
    }
    println!("all 10 criteria pass");
}
