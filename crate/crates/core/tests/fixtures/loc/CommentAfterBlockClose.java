class M {
    /* a */ /* b */ // c
    int x; /* d
    e */
}
