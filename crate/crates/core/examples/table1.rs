//! The size by degree grid at a reduced scale, printed as CSV.
use netmix::simulation::{reports_to_csv, table1, table1_grid, Table1Row};

fn main() -> netmix::Result<()> {
    let rows: Vec<Table1Row> = table1_grid()
        .into_iter()
        .map(|r| Table1Row { n: r.n / 10, ..r })
        .collect();
    let reports = table1(&rows, 200, 0, 0)?;
    print!("{}", reports_to_csv(&reports));
    Ok(())
}
