use accel_model::{BankedMemory, Geometry};

/// 4x4 page filled with value = flat row-major index, the layout used in
/// the striping illustrations.
fn small_page() -> BankedMemory {
    let mut mem = BankedMemory::new(Geometry::square(2), 8);
    mem.map_page(0, 0).unwrap();
    for r in 0..4 {
        for c in 0..4 {
            mem.poke(0, r, c, (4 * r + c) as u32).unwrap();
        }
    }
    mem
}

#[test]
fn column_one_comes_back_in_bank_order() {
    let mem = small_page();
    assert_eq!(mem.read_col(0, 1).unwrap(), vec![5, 1, 13, 9]);
}

#[test]
fn column_elements_land_in_xored_banks() {
    let g = Geometry::square(2);
    assert_eq!(g.bank(1, 1), 0);
    assert_eq!(g.bank(3, 1), 2);
    assert_eq!(g.bank(2, 1), 3);
    assert_eq!(g.bank(0, 1), 1);
}

#[test]
fn row_write_then_read_is_identity() {
    let mut mem = BankedMemory::new(Geometry::square(4), 32);
    mem.map_page(3, 16).unwrap();
    for r in 0..16 {
        let lanes: Vec<u32> = (0..16).map(|b| (100 * r + b) as u32).collect();
        mem.write_row(3, r, &lanes).unwrap();
        assert_eq!(mem.read_row(3, r).unwrap(), lanes);
    }
}

#[test]
fn column_write_then_read_is_identity() {
    let mut mem = BankedMemory::new(Geometry::square(4), 32);
    mem.map_page(3, 0).unwrap();
    for c in 0..16 {
        let lanes: Vec<u32> = (0..16).map(|b| (1000 * c + b) as u32).collect();
        mem.write_col(3, c, &lanes).unwrap();
        assert_eq!(mem.read_col(3, c).unwrap(), lanes);
    }
}

#[test]
fn row_and_column_views_agree_on_elements() {
    let mem = small_page();
    for r in 0..4 {
        let row = mem.read_row(0, r).unwrap();
        for b in 0..4 {
            // lane b of a row read is element (r, r ^ b)
            assert_eq!(row[b], (4 * r + (r ^ b)) as u32);
        }
    }
    for c in 0..4 {
        let col = mem.read_col(0, c).unwrap();
        for b in 0..4 {
            // lane b of a column read is element (b ^ c, c)
            assert_eq!(col[b], (4 * (b ^ c) + c) as u32);
        }
    }
}

#[test]
fn full_configuration_capacity() {
    let mem = BankedMemory::full_config();
    assert_eq!(mem.geometry.banks(), 256);
    assert_eq!(mem.words_per_bank(), 1 << 16);
    assert_eq!(mem.total_words(), 1 << 24);
    assert_eq!(mem.total_words() * 4, 64 << 20);
}

#[test]
fn dump_is_bank_major_little_endian() {
    let mut mem = BankedMemory::new(Geometry::square(2), 4);
    mem.map_page(0, 0).unwrap();
    // element (0, 0) -> bank 0 word 0; element (1, 0) -> bank 1 word 1
    mem.poke(0, 0, 0, 0xdead_beef).unwrap();
    mem.poke(0, 1, 0, 0x0102_0304).unwrap();
    let bytes = mem.dump();
    assert_eq!(bytes.len(), 4 * 4 * 4);
    assert_eq!(&bytes[0..4], &[0xef, 0xbe, 0xad, 0xde]);
    assert_eq!(&bytes[4 * 4 + 4..4 * 4 + 8], &[0x04, 0x03, 0x02, 0x01]);

    let mut other = BankedMemory::new(Geometry::square(2), 4);
    other.map_page(0, 0).unwrap();
    other.load(&bytes);
    assert_eq!(other.dump(), bytes);
    assert_eq!(other.peek(0, 0, 0).unwrap(), 0xdead_beef);
    assert_eq!(other.peek(0, 1, 0).unwrap(), 0x0102_0304);
}
