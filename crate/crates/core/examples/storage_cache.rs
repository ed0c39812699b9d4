//! The binary TT format and the on-disk operator cache.

use std::fs::File;
use std::io::{BufReader, BufWriter};

use ttkry::experiment::OperatorCache;
use ttkry::tt::{read_any, write_tensor, TtFile};

pub fn run_example() -> ttkry::Result<()> {
    let dir = std::env::temp_dir().join(format!("ttkry-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;

    let rhs = ttkry::operators::conv_diff_rhs(16, 1.0)?;
    let path = dir.join("rhs.tt");
    write_tensor(&mut BufWriter::new(File::create(&path)?), &rhs)?;
    match read_any(&mut BufReader::new(File::open(&path)?))? {
        TtFile::Tensor(t) => println!("read back a tensor with ranks {:?}", t.ranks()),
        TtFile::Matrix(_) => println!("unexpected operator"),
    }

    let cache = OperatorCache::new(dir.join("ops"));
    let key = "expsum n=16 d=3 M=25";
    let built = cache.get_or_build(key, || ttkry::operators::inv_laplace_expsum(16, 3, 25))?;
    let loaded = cache.get_or_build(key, || unreachable!("second lookup is served from disk"))?;
    println!("cached {} -> ranks {:?} / {:?}", cache.path_for(key).display(), built.ranks(), loaded.ranks());

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> ttkry::Result<()> {
    run_example()
}
