//! Check explicit valuation tables for submodularity, order-neutrality and
//! the `{-1, 0, c}` marginal range.

use manna::instgen::{fixtures, random_two_valued_table, SplitMix64};
use manna::valuations::{
    telescoping_vector, validate_order_neutral, validate_range, validate_submodular, ExplicitTable,
};
use manna::{ItemId, ItemSet, ValuationSpec};

fn show(name: &str, table: &ExplicitTable, c: i64) {
    let fmt = |r: Result<(), manna::valuations::ValidationFailure>| match r {
        Ok(()) => "ok".to_string(),
        Err(f) => f.to_string(),
    };
    println!("{name}");
    println!("  submodular:    {}", fmt(validate_submodular(table)));
    println!("  order-neutral: {}", fmt(validate_order_neutral(table)));
    println!("  range:         {}", fmt(validate_range(table, c)));
}

fn main() {
    // Submodular but not order-neutral: inserting o0 then o1 gives (0, 0),
    // the other order gives (-1, 1).
    let non_on = fixtures::non_on();
    let spec = &non_on.valuations()[0];
    let both: ItemSet = [ItemId::new(0), ItemId::new(1)].into_iter().collect();
    for order in [[0, 1], [1, 0]] {
        let order: Vec<ItemId> = order.into_iter().map(ItemId::new).collect();
        let shown: Vec<String> = order.iter().map(|o| o.to_string()).collect();
        println!("insert {}: {:?}", shown.join(" then "), telescoping_vector(spec, &both, &order).unwrap().0);
    }
    show("non_on", &spec.materialize(2).unwrap(), 1);

    // A graphic matroid rank function.
    show("fig1", &fixtures::fig1().valuations()[0].materialize(9).unwrap(), 1);

    // Two-valued submodular tables are always order-neutral.
    let mut rng = SplitMix64::new(5);
    let table = random_two_valued_table(6, &mut rng, -1, 2);
    show("random {-1, 2} table on 6 items", &table, 2);

    // Capped groups are order-neutral by construction.
    let capped = ValuationSpec::capped_groups(
        vec![manna::Group { items: (0..4).map(ItemId::new).collect(), cap: 2, hi: 3, lo: -1 }],
        0,
    );
    show("capped group", &capped.materialize(6).unwrap(), 3);
}
