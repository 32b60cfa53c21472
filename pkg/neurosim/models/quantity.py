from typing import Any

from pydantic import BaseModel, ConfigDict, Field


def quantity(unit: str, default: Any = ..., **constraints: Any) -> Any:
    """
    带单位的字段，单位存在 json_schema_extra 里，配置解析时据此做量纲检查
    :param unit: 基本单位符号，比如 'A'、'F'、's'
    :param default: 默认值
    :return: pydantic Field
    """
    return Field(default, json_schema_extra={'unit': unit}, **constraints)


def field_unit(model: type[BaseModel], name: str) -> str | None:
    extra = model.model_fields[name].json_schema_extra
    if isinstance(extra, dict):
        return extra.get('unit')
    return None


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')
