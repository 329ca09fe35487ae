import pytest

from domain.exceptions.schedule_exceptions import OrderingViolationError
from domain.value_objects.injection_schedule import (
    DEFAULT_ORDER,
    InjectionOrder,
    InjectionSchedule,
)
from domain.value_objects.primitive_kind import PrimitiveKind


class TestInjectionOrder:
    def test_default_is_object_relation_attribute(self):
        assert str(DEFAULT_ORDER) == "O-R-A"

    def test_parse_accepts_compact_and_dashed(self):
        assert str(InjectionOrder.parse("a-r-o")) == "A-R-O"
        assert str(InjectionOrder.parse("ROA")) == "R-O-A"

    def test_parse_rejects_repeats(self):
        with pytest.raises(ValueError):
            InjectionOrder.parse("O-O-A")

    def test_parse_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            InjectionOrder.parse("O-R")

    def test_all_orders(self):
        orders = {str(order) for order in InjectionOrder.all_orders()}
        assert orders == {"O-R-A", "O-A-R", "R-O-A", "R-A-O", "A-O-R", "A-R-O"}

    def test_slot_of(self):
        order = InjectionOrder.parse("A-R-O")
        assert order.slot_of(PrimitiveKind.ATTRIBUTE) == 0
        assert order.slot_of(PrimitiveKind.OBJECT) == 2


class TestInjectionSchedule:
    def test_fixed_schedule(self):
        schedule = InjectionSchedule.fixed(8, 30, 40)
        assert schedule.slots == (0, 8, 30)
        assert schedule.to_dict()["windows"]["attr"] == [30, 30]

    def test_s_rel_equal_to_s_obj_allowed(self):
        assert InjectionSchedule.fixed(0, 1, 2).s_rel == 0

    @pytest.mark.parametrize(
        "s_rel,s_attr,steps",
        [(5, 5, 40), (6, 5, 40), (8, 40, 40), (-1, 3, 40)],
    )
    def test_ordering_violations(self, s_rel, s_attr, steps):
        with pytest.raises(OrderingViolationError):
            InjectionSchedule.fixed(s_rel, s_attr, steps)

    def test_nonzero_object_step_rejected(self):
        with pytest.raises(OrderingViolationError):
            InjectionSchedule(s_obj=1, s_rel=2, s_attr=3, steps=10)

    def test_injection_step_follows_order(self):
        schedule = InjectionSchedule.fixed(8, 30, 40)
        order = InjectionOrder.parse("A-R-O")
        assert schedule.injection_step(PrimitiveKind.ATTRIBUTE, order) == 0
        assert schedule.injection_step(PrimitiveKind.RELATION, order) == 8
        assert schedule.injection_step(PrimitiveKind.OBJECT, order) == 30

    def test_window_start_anchor(self):
        schedule = InjectionSchedule(
            s_obj=0,
            s_rel=8,
            s_attr=30,
            steps=40,
            windows={"obj": (0, 0), "rel": (6, 10), "attr": (29, 31)},
        )
        assert schedule.injection_step(PrimitiveKind.RELATION, anchor="window_start") == 6
        assert schedule.injection_step(PrimitiveKind.ATTRIBUTE, anchor="step") == 30
