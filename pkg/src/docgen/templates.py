"""Context templates wrapping an identity table.

Prose fragments are chosen so that no short word in them reads as a personal
name: every CJK run is either a single character or at least four long.
"""

import random
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Callable

from src.core.errors import UnsupportedFormat
from src.core.identity import PairSet

CITIES = (
    "杭州市西湖区", "南京市鼓楼区", "成都市锦江区", "武汉市江岸区", "广州市越秀区",
    "深圳市福田区", "西安市新城区", "济南市历下区", "长沙市芙蓉区", "昆明市五华区",
    "郑州市金水区", "福州市鼓楼区", "沈阳市和平区", "合肥市瑶海区", "贵阳市南明区",
)

UNITS = (
    "华东区域运营服务中心", "西南片区综合管理办公室", "北方物流配送分拨中心",
    "滨海新区社区服务中心", "城东街道综合服务站", "高新园区企业服务中心",
)

VENUES = (
    "西湖畔商务宾馆", "滨江国际青年旅舍", "城南假日酒店", "东方明珠快捷酒店", "湖畔山居度假村",
)

INSURANCE_KINDS = ("医疗保险", "养老保险", "工伤保险", "失业保险")
GENDERS = ("男", "女")

DATE_FIRST = date(2022, 1, 1)
DATE_SPAN_DAYS = 730


@dataclass
class DocumentLayout:
    """Everything a writer needs to render one document."""
    title: str
    context: list[str]
    header: list[str]
    rows: list[list[str]]
    footer: str
    name_col: int
    id_col: int
    context_fields: dict[str, str] = field(default_factory=dict)


def _random_date(rng: random.Random) -> date:
    return DATE_FIRST + timedelta(days=rng.randrange(DATE_SPAN_DAYS))


def _cn_date(value: date) -> str:
    return f"{value.year}年{value.month:02d}月{value.day:02d}日"


def _insurance_form(truth: PairSet, rng: random.Random) -> DocumentLayout:
    unit = rng.choice(UNITS)
    region = rng.choice(CITIES)
    filed = _cn_date(_random_date(rng))
    rows = [
        [str(index), pair.name, pair.id_number, rng.choice(INSURANCE_KINDS)]
        for index, pair in enumerate(truth.pairs, start=1)
    ]
    return DocumentLayout(
        title="参保人员登记表",
        context=[f"填报单位：{unit}", f"参保地区：{region}", f"填报日期：{filed}"],
        header=["序号", "姓名", "身份证号", "险种"],
        rows=rows,
        footer="以上信息由经办人员核对无误",
        name_col=1,
        id_col=2,
        context_fields={"填报单位": unit, "参保地区": region, "填报日期": filed},
    )


def _travel_record(truth: PairSet, rng: random.Random) -> DocumentLayout:
    trip = f"TR{rng.randrange(100000, 1000000)}"
    origin = rng.choice(CITIES)
    departure = _random_date(rng)
    rows = [
        [pair.name, pair.id_number, (departure + timedelta(days=rng.randrange(3))).isoformat()]
        for pair in truth.pairs
    ]
    recorded = _cn_date(departure)
    return DocumentLayout(
        title="出行人员信息记录",
        context=[f"行程编号：{trip}", f"出发城市：{origin}", f"记录日期：{recorded}"],
        header=["姓名", "身份证号", "出行日期"],
        rows=rows,
        footer="本记录仅用于出行安全管理",
        name_col=0,
        id_col=1,
        context_fields={"行程编号": trip, "出发城市": origin, "记录日期": recorded},
    )


def _registration_sheet(truth: PairSet, rng: random.Random) -> DocumentLayout:
    venue = rng.choice(VENUES)
    checked_in = _cn_date(_random_date(rng))
    rows = [
        [str(index), pair.name, rng.choice(GENDERS), pair.id_number]
        for index, pair in enumerate(truth.pairs, start=1)
    ]
    return DocumentLayout(
        title="住宿人员登记簿",
        context=[f"登记场所：{venue}", f"登记日期：{checked_in}"],
        header=["序号", "姓名", "性别", "身份证号"],
        rows=rows,
        footer="请妥善保管旅客登记信息",
        name_col=1,
        id_col=3,
        context_fields={"登记场所": venue, "登记日期": checked_in},
    )


TEMPLATES: dict[str, Callable[[PairSet, random.Random], DocumentLayout]] = {
    "insurance_form": _insurance_form,
    "travel_record": _travel_record,
    "registration_sheet": _registration_sheet,
}

TEMPLATE_IDS = tuple(TEMPLATES)


def fill_template(template_id: str, truth: PairSet, rng: random.Random) -> DocumentLayout:
    try:
        builder = TEMPLATES[template_id]
    except KeyError as e:
        raise UnsupportedFormat(f"unknown template {template_id!r}") from e
    return builder(truth, rng)
