use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use selcol_core::io::{parse_instance, read_instance_file, write_instance, write_instance_file};
use selcol_core::perfectgen::{default_library, density_reachable, generate_instance, GenConfig, DEFAULT_EPSILON};
use selcol_core::selcol::{solve, Method, SolveOptions};
use selcol_core::SelColInstance;

#[test]
fn generated_instances_roundtrip_byte_identically() {
    let lib = default_library();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut done = 0;
    while done < 100 {
        let n = rng.gen_range(4..=30);
        let rho = rng.gen_range(0.1..0.9);
        if !density_reachable(n, rho, DEFAULT_EPSILON) {
            continue;
        }
        let inst = generate_instance(&GenConfig::new(n, rho, rng.gen()), 1, 4.min(n), lib).unwrap();
        let text = write_instance(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(write_instance(&back), text);
        done += 1;
    }
}

#[test]
fn cube_file_parses_and_solves_to_one() {
    let dir = std::env::temp_dir().join(format!("selcol-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cube.selcol");
    write_instance_file(&path, &SelColInstance::cube_example()).unwrap();
    let inst = read_instance_file(&path).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    let r = solve(&inst, Method::CutplaneGeneral, &SolveOptions::with_time_limit(10.0)).unwrap();
    assert_eq!(r.optimum(), Some(1));
}

#[test]
fn minimal_file_has_value_two() {
    let inst = parse_instance("p selcol 2 1 2\ne 1 2\nk 1 1\nk 2 2\n").unwrap();
    let r = solve(&inst, Method::Ip, &SolveOptions::with_time_limit(10.0)).unwrap();
    assert_eq!(r.optimum(), Some(2));
}
