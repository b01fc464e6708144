"""Plain-Python model of the dedup/insert corpus program, used as a test oracle.

Locations are strings: "t.<x>.<depth>", "dd.<x>", "r.<x>", and the input
cells "a1".. and "emp".  Values are tuples.
"""


def run(values, hash_bit):
    names = ["n%d" % (j + 1) for j in range(len(values))]
    store = {"emp": ("Emp",)}
    for j, (x, v) in enumerate(zip(names, values)):
        store["a%d" % (j + 1)] = ("Cons", x, v, "a%d" % (j + 2))
    store["a%d" % (len(values) + 1)] = ("Nil",)
    seeded = set(store)
    writes = []

    def write(p, v):
        writes.append(p)
        store[p] = v

    def insrec(x, y, t, i):
        node = store[t]
        xn = "t.%s.%d" % (x, i)
        if i == 4:
            pres = node[0] == "Leaf" and node[2] == y
            write(xn, ("Leaf", x, y))
            return xn, pres
        bit = hash_bit(y, i)
        if node[0] == "Bin":
            l, r = node[1], node[2]
            if bit:
                c, pres = insrec(x, y, l, i + 1)
                write(xn, ("Bin", c, r))
            else:
                c, pres = insrec(x, y, r, i + 1)
                write(xn, ("Bin", l, c))
        else:
            c, pres = insrec(x, y, t, i + 1)
            write(xn, ("Bin", c, t) if bit else ("Bin", t, c))
        return xn, pres

    def dedup(l, t):
        node = store[l]
        if node[0] == "Nil":
            return l
        _, x, y, ys = node
        tx, b = insrec(x, y, t, 0)
        write("dd." + x, ("Thunk", ys, tx))
        if b:
            return dedup(ys, tx)
        tl = dedup(ys, tx)
        write("r." + x, ("Cons", x, y, tl))
        return "r." + x

    out = dedup("a1", "emp")
    alloc = {p: v for p, v in store.items() if p not in seeded}
    return out, alloc, writes
