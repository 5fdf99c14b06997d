//! Generate seeded instances and round-trip them through JSON.
//!
//! ```text
//! cargo run --example generate_instances -- /tmp/instances
//! ```

use std::path::PathBuf;

use manna::instgen::{
    fixtures, gen_capped_groups, gen_random_additive, instance_to_json, parse_instance, CappedParams, SplitMix64,
};

fn main() {
    let dir = std::env::args().nth(1).map(PathBuf::from);

    let mut rng = SplitMix64::new(0);
    println!("splitmix64(0): {:#018x} {:#018x}", rng.next_u64(), rng.next_u64());

    let mut named = vec![
        ("additive_seed42".to_string(), gen_random_additive(2, 4, 1, (1, 1, 2), 42).unwrap()),
        (
            "capped_seed7".to_string(),
            gen_capped_groups(&CappedParams { n: 2, m: 6, c: 2, groups: 0..=3, caps: 0..=3, seed: 7 }).unwrap(),
        ),
    ];
    named.extend(fixtures::all().into_iter().map(|(n, i)| (n.to_string(), i)));

    for (name, inst) in &named {
        let text = instance_to_json(inst);
        assert_eq!(&parse_instance(&text).unwrap(), inst);
        match &dir {
            Some(dir) => {
                std::fs::create_dir_all(dir).unwrap();
                let path = dir.join(format!("{name}.json"));
                std::fs::write(&path, &text).unwrap();
                println!("wrote {}", path.display());
            }
            None => println!("{name}: {} bytes, {} agents, {} items", text.len(), inst.num_agents(), inst.num_items()),
        }
    }
}
