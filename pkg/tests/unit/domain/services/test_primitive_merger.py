from domain.services.primitive_merger import PrimitiveMerger


class TestMergePrimitives:
    def test_case_insensitive_duplicate_keeps_first_spelling(self):
        prims = PrimitiveMerger().merge(
            objects=[("Cat", ["black"]), ("dog", []), (" cat ", ["white", "black"])],
            relations=[(0, "next to", 1), (2, "next to", 1)],
        )

        assert prims.objects == ("Cat", "dog")
        assert prims.relations == ((0, "next to", 1),)
        assert prims.attributes == ((0, "black"), (0, "white"))

    def test_blank_attributes_dropped(self):
        prims = PrimitiveMerger().merge(objects=[("ball", ["  ", "red"])])
        assert prims.attributes == ((0, "red"),)

    def test_extra_attribute_pairs_are_remapped(self):
        prims = PrimitiveMerger().merge(
            objects=[("ball", []), ("Ball", [])], attributes=[(1, "round")]
        )
        assert prims.objects == ("ball",)
        assert prims.attributes == ((0, "round"),)

    def test_attributes_grouped_by_owner(self):
        prims = PrimitiveMerger().merge(
            objects=[("ball", []), ("table", ["wooden"])], attributes=[(0, "red")]
        )
        assert prims.attributes == ((0, "red"), (1, "wooden"))
